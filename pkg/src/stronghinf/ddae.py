"""Delay differential algebraic systems in descriptor form.

The central object is the system

    E x'(t) = A0 x(t) + sum_i Ai x(t - tau_i) + B w(t),
        z(t) = C x(t),

with a possibly singular E.  The left/right nullspace bases of E carry the
algebraic part of the dynamics: they decide well-posedness of the algebraic
constraints (``check_causality``), define the asymptotic transfer function,
and enter the strong-stability test of the delay-difference part.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import CausalityError

__all__ = [
    "DelayVector",
    "DdaeSystem",
    "NullspaceBases",
    "compute_nullspaces",
    "check_causality",
    "require_causality",
    "effective_delay_indices",
]

CAUSALITY_TOL = 1e-10


@dataclass(frozen=True)
class DelayVector:
    """Positive delays stored sorted ascending.

    ``original_indices[k]`` is the position the k-th sorted delay had in the
    caller's ordering; duplicates are kept as separate entries because
    distinct matrices may share a delay value.
    """

    taus: tuple[float, ...]
    original_indices: tuple[int, ...]

    @classmethod
    def from_values(cls, values) -> "DelayVector":
        values = [float(t) for t in values]
        for t in values:
            if not t > 0.0:
                raise ValueError(f"delays must be positive, got {t}")
        order = sorted(range(len(values)), key=lambda i: values[i])
        return cls(tuple(values[i] for i in order), tuple(order))

    def __len__(self) -> int:
        return len(self.taus)

    @property
    def tau_max(self) -> float:
        return max(self.taus) if self.taus else 0.0


@dataclass(frozen=True)
class DdaeSystem:
    """Descriptor delay system E x' = A0 x + sum Ai x(t-tau_i) + B w, z = C x.

    ``A[0]`` is the undelayed matrix; ``A[i]`` pairs with ``delays.taus[i-1]``.
    Instances are immutable; matrices are copied and write-protected at
    construction.
    """

    E: NDArray[np.float64]
    A: tuple[NDArray[np.float64], ...]
    B: NDArray[np.float64]
    C: NDArray[np.float64]
    delays: DelayVector = field(default_factory=lambda: DelayVector((), ()))

    @classmethod
    def from_matrices(cls, E, A, delays, B, C) -> "DdaeSystem":
        """Build a system from raw matrices, sorting delays ascending.

        ``A`` lists the undelayed matrix first, then one matrix per delay in
        the caller's delay order; the sort permutation is applied to both.
        """
        E = _as_square(E, "E")
        n = E.shape[0]
        dv = DelayVector.from_values(delays)
        A = [np.array(Ai, dtype=float) for Ai in A]
        if len(A) != len(dv) + 1:
            raise ValueError(f"need {len(dv) + 1} A matrices, got {len(A)}")
        A_sorted = [A[0]] + [A[i + 1] for i in dv.original_indices]
        for Ai in A_sorted:
            if Ai.shape != (n, n):
                raise ValueError(f"A matrix shape {Ai.shape} != ({n}, {n})")
        B = np.atleast_2d(np.array(B, dtype=float))
        C = np.atleast_2d(np.array(C, dtype=float))
        if B.shape[0] != n:
            raise ValueError(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise ValueError(f"C has {C.shape[1]} columns, expected {n}")
        for M in (E, *A_sorted, B, C):
            M.setflags(write=False)
        return cls(E, tuple(A_sorted), B, C, dv)

    @property
    def n(self) -> int:
        return self.E.shape[0]

    @property
    def m(self) -> int:
        return len(self.delays)

    @property
    def n_w(self) -> int:
        return self.B.shape[1]

    @property
    def n_z(self) -> int:
        return self.C.shape[0]


def _as_square(M, name: str) -> NDArray[np.float64]:
    M = np.atleast_2d(np.array(M, dtype=float))
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


@dataclass(frozen=True)
class NullspaceBases:
    """Orthonormal bases of the left/right nullspaces of E.

    U^T E = 0 and E V = 0; ``v = n - rank(E)`` is the number of columns.
    For nonsingular E both bases are n-by-0.
    """

    U: NDArray[np.float64]
    V: NDArray[np.float64]
    v: int


def compute_nullspaces(sys: DdaeSystem) -> NullspaceBases:
    """Nullspace bases of E with rank decided by SVD.

    Singular values below ``n * eps * sigma_1(E)`` count as zero, so an exact
    zero matrix gets the full nullity n.
    """
    n = sys.n
    Uf, s, Vft = np.linalg.svd(sys.E)
    thresh = n * np.finfo(float).eps * (s[0] if s.size else 0.0)
    rank = int(np.sum(s > thresh))
    U = Uf[:, rank:].copy()
    V = Vft[rank:, :].T.copy()
    U.setflags(write=False)
    V.setflags(write=False)
    return NullspaceBases(U=U, V=V, v=n - rank)


def check_causality(sys: DdaeSystem, bases: NullspaceBases,
                    tol: float = CAUSALITY_TOL) -> bool:
    """True iff U^T A0 V is safely nonsingular (trivially true for v = 0)."""
    if bases.v == 0:
        return True
    block = bases.U.T @ sys.A[0] @ bases.V
    smin = np.linalg.svd(block, compute_uv=False)[-1]
    return bool(smin > tol)


def require_causality(sys: DdaeSystem, bases: NullspaceBases,
                      tol: float = CAUSALITY_TOL) -> None:
    if not check_causality(sys, bases, tol):
        raise CausalityError(
            "U^T A0 V is singular: the algebraic constraints are not "
            "solvable (ill-posed algebraic loop)")


def effective_delay_indices(sys: DdaeSystem, bases: NullspaceBases) -> list[int]:
    """Indices i (0-based into delays) whose projected block U^T A_{i+1} V
    is nonzero.

    Only these delays enter the asymptotic transfer function; in closed
    loops most projected blocks vanish, which keeps the angle-space search
    low dimensional.
    """
    if bases.v == 0:
        return []
    out = []
    for i in range(sys.m):
        Ai = sys.A[i + 1]
        blk = bases.U.T @ Ai @ bases.V
        scale = max(1.0, float(np.linalg.norm(Ai)))
        if np.linalg.norm(blk) > 1e-12 * scale:
            out.append(i)
    return out
