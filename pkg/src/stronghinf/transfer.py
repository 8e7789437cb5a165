"""Transfer function evaluation.

Three views of the same system: the transfer function T(lambda), its
high-frequency limit T_a(lambda), and the delay-angle form of the limit,

    T(lambda)       = C (lambda E - A0 - sum_i Ai e^{-lambda tau_i})^{-1} B,
    Ta_theta(theta) = C V (-U^T A0 V - sum_i U^T Ai V e^{-j theta_i})^{-1} U^T B.

T and T_a converge to each other as |omega| grows; the angle form decouples
the angles theta_i = omega tau_i from the frequency and is what the strong
norm of T_a maximizes over.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .ddae import DdaeSystem, NullspaceBases
from .errors import NumericalFailure

__all__ = ["FrequencyResponse", "SweepTable", "eval_T", "eval_Ta_theta",
           "eval_Ta", "delay_angle_matrix", "resolvent",
           "singular_kernel_pair", "sweep"]

# resolvents with condition numbers beyond this are treated as singular
POLE_COND = 1e14


@dataclass(frozen=True)
class FrequencyResponse:
    """Matrix value of a transfer function at one point plus sigma_1."""

    lam: complex
    matrix: NDArray[np.complex128]
    sigma1: float


def _response(lam: complex, M: NDArray, B: NDArray, C: NDArray,
              what: str) -> FrequencyResponse:
    if C.shape[1] == 0:
        # empty state space, the response is identically zero
        T = np.zeros((C.shape[0], B.shape[1]), dtype=complex)
        return FrequencyResponse(lam, T, 0.0)
    if np.linalg.cond(M) > POLE_COND:
        raise NumericalFailure(
            f"{what} is singular at lambda = {lam}: transmission pole")
    T = C @ np.linalg.solve(M, B)
    sigma1 = float(np.linalg.svd(T, compute_uv=False)[0]) if T.size else 0.0
    return FrequencyResponse(lam, T, sigma1)


def resolvent(sys: DdaeSystem, lam: complex) -> NDArray[np.complex128]:
    """The resolvent matrix lambda E - A0 - sum_i Ai e^{-lambda tau_i}."""
    lam = complex(lam)
    M = lam * sys.E - sys.A[0].astype(complex)
    for tau, Ai in zip(sys.delays.taus, sys.A[1:]):
        M -= Ai * np.exp(-lam * tau)
    return M


def eval_T(sys: DdaeSystem, lam: complex) -> FrequencyResponse:
    """Evaluate T(lambda) by one LU solve."""
    lam = complex(lam)
    return _response(lam, resolvent(sys, lam), sys.B, sys.C, "resolvent")


def singular_kernel_pair(M: NDArray[np.complex128], B: NDArray, C: NDArray):
    """Kernel pair of the level-set block system from the top singular triple.

    With T = C M^{-1} B and T w_r = sigma w_l, the vectors u = M^{-1} B w_r
    and v = M^{-*} C^T w_l satisfy M u = sigma^{-1} B B^T v and
    M^* v = sigma^{-1} C^T C u exactly; returns (u, v, singular values).
    """
    T = C @ np.linalg.solve(M, B)
    wl, s, wrh = np.linalg.svd(T)
    u = np.linalg.solve(M, B @ wrh[0].conj())
    v = np.linalg.solve(M.conj().T, C.T @ wl[:, 0])
    return u, v, s


def delay_angle_matrix(sys: DdaeSystem, bases: NullspaceBases,
                       theta) -> NDArray[np.complex128]:
    """The v-by-v inner matrix -U^T A0 V - sum_i U^T Ai V e^{-j theta_i}."""
    U, V = bases.U, bases.V
    M = -(U.T @ sys.A[0] @ V).astype(complex)
    for th, Ai in zip(theta, sys.A[1:]):
        M -= (U.T @ Ai @ V) * np.exp(-1j * th)
    return M


def eval_Ta_theta(sys: DdaeSystem, bases: NullspaceBases,
                  theta) -> FrequencyResponse:
    """Delay-angle form of the asymptotic transfer function at angles theta.

    theta has one entry per delay; entries of non-effective delays are
    irrelevant (their projected blocks vanish).  For v = 0 the response is
    identically zero.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if len(theta) != sys.m:
        raise ValueError(f"theta has length {len(theta)}, expected {sys.m}")
    if bases.v == 0:
        T = np.zeros((sys.n_z, sys.n_w), dtype=complex)
        return FrequencyResponse(0j, T, 0.0)
    M = delay_angle_matrix(sys, bases, theta)
    return _response(0j, M, bases.U.T @ sys.B, sys.C @ bases.V,
                     "asymptotic inner matrix")


def eval_Ta(sys: DdaeSystem, bases: NullspaceBases,
            lam: complex) -> FrequencyResponse:
    """Asymptotic transfer function T_a(lambda) for lambda = j omega.

    Defined so that eval_Ta(j omega) equals eval_Ta_theta at
    theta_i = omega tau_i mod 2 pi.
    """
    omega = complex(lam).imag
    theta = np.mod(omega * np.asarray(sys.delays.taus, dtype=float),
                   2.0 * np.pi)
    resp = eval_Ta_theta(sys, bases, theta)
    return FrequencyResponse(lam, resp.matrix, resp.sigma1)


@dataclass(frozen=True)
class SweepTable:
    """Sampled (omega, sigma_k(T(j omega))) rows for plotting and export."""

    omegas: NDArray[np.float64]
    sigmas: NDArray[np.float64]  # shape (len(omegas), k)

    @property
    def k(self) -> int:
        return self.sigmas.shape[1]


def sweep(sys: DdaeSystem, omegas, k: int = 1) -> SweepTable:
    """Evaluate the top k singular values of T over a frequency list."""
    omegas = np.asarray(omegas, dtype=float)
    k = min(k, sys.n_z, sys.n_w)
    rows = np.empty((len(omegas), k))
    for idx, w in enumerate(omegas):
        resp = eval_T(sys, 1j * w)
        sv = np.linalg.svd(resp.matrix, compute_uv=False)
        rows[idx] = sv[:k]
    return SweepTable(omegas=omegas, sigmas=rows)
