"""Brute-force reference computations.

These are deliberately slow, independent implementations used to validate
the level-set pipeline: a dense frequency sweep with local refinement, a
dense delay-angle grid for the asymptotic norm, and the classical
Hamiltonian-bisection H-infinity norm for delay-free systems.  All three are
lower bounds of their respective suprema, so the main algorithm has to
dominate them within tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.optimize

from .ddae import DdaeSystem, NullspaceBases, compute_nullspaces, effective_delay_indices
from .transfer import eval_T, eval_Ta_theta

__all__ = ["DenseSweepSpec", "dense_hinf", "dense_ta", "bb_bisection"]


@dataclass(frozen=True)
class DenseSweepSpec:
    omega_min: float = 1e-3
    omega_max: float = 1e3
    points: int = 2000
    log: bool = True
    theta_points: int = 400    # per delay dimension

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("need at least 2 sweep points")

    def omegas(self) -> np.ndarray:
        if self.log:
            grid = np.logspace(np.log10(self.omega_min),
                               np.log10(self.omega_max), self.points)
        else:
            grid = np.linspace(self.omega_min, self.omega_max, self.points)
        return np.concatenate([[0.0], grid])


def dense_hinf(sys: DdaeSystem, spec: DenseSweepSpec | None = None) -> float:
    """Grid maximum of sigma_1(T(j omega)), golden-refined at the top 3
    local maxima; a lower bound of the supremum."""
    spec = spec or DenseSweepSpec()
    omegas = spec.omegas()
    vals = np.array([eval_T(sys, 1j * w).sigma1 for w in omegas])
    order = np.argsort(vals)[::-1]
    best = float(vals[order[0]])
    for idx in order[:3]:
        lo = omegas[idx - 1] if idx > 0 else 0.0
        hi = omegas[idx + 1] if idx + 1 < len(omegas) else 2.0 * omegas[idx] + 1.0
        opt = scipy.optimize.minimize_scalar(
            lambda w: -eval_T(sys, 1j * w).sigma1,
            bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12 * (1.0 + hi)})
        best = max(best, float(-opt.fun))
    return best


def dense_ta(sys: DdaeSystem, bases: NullspaceBases | None = None,
             spec: DenseSweepSpec | None = None) -> float:
    """Dense delay-angle grid for the strong norm of T_a, polished by
    Nelder-Mead from the best grid point."""
    spec = spec or DenseSweepSpec()
    if bases is None:
        bases = compute_nullspaces(sys)
    if bases.v == 0:
        return 0.0
    eff = effective_delay_indices(sys, bases)
    if not eff:
        return eval_Ta_theta(sys, bases, np.zeros(sys.m)).sigma1

    # keep the total grid size bounded regardless of delay count
    per_dim = min(spec.theta_points,
                  max(8, int(round(1e6 ** (1.0 / len(eff))))))
    axes = [np.linspace(0.0, 2.0 * np.pi, per_dim, endpoint=False)
            for _ in eff]

    def value(theta_eff) -> float:
        theta = np.zeros(sys.m)
        theta[list(eff)] = theta_eff
        return eval_Ta_theta(sys, bases, theta).sigma1

    best_val, best_theta = -1.0, None
    for combo in np.stack(np.meshgrid(*axes, indexing="ij"),
                          axis=-1).reshape(-1, len(eff)):
        v = value(combo)
        if v > best_val:
            best_val, best_theta = v, combo
    opt = scipy.optimize.minimize(lambda th: -value(th), best_theta,
                                  method="Nelder-Mead",
                                  options={"xatol": 1e-12, "fatol": 1e-14,
                                           "maxiter": 4000})
    return float(max(best_val, -opt.fun))


def _imag_eigs(A, B, C, gamma: float) -> bool:
    """True when the Hamiltonian at level gamma has imaginary eigenvalues."""
    H = np.block([[A, (B @ B.T) / gamma],
                  [-(C.T @ C) / gamma, -A.T]])
    lam = scipy.linalg.eigvals(H)
    return bool(np.any(np.abs(lam.real) <= 1e-9 * (1.0 + np.abs(lam))))


def bb_bisection(sys: DdaeSystem, tol: float = 1e-9) -> float:
    """H-infinity norm of a delay-free system by Hamiltonian bisection.

    The system must have an invertible E (it is folded into standard state
    space) and a stable A; delays, if present, must all carry zero matrices.
    """
    for Ai in sys.A[1:]:
        if np.linalg.norm(Ai) > 0.0:
            raise ValueError("bisection oracle only handles delay-free systems")
    if np.linalg.cond(sys.E) > 1e12:
        raise ValueError("bisection oracle needs an invertible E")
    A = np.linalg.solve(sys.E, sys.A[0])
    B = np.linalg.solve(sys.E, sys.B)
    C = sys.C
    eig = scipy.linalg.eigvals(A)
    if np.max(eig.real) >= 0.0:
        raise ValueError("bisection oracle rejects unstable systems")

    # initial lower bound from DC, resonances, and a coarse sweep
    probes = np.concatenate([[0.0], np.abs(eig.imag), np.logspace(-2, 2, 20)])
    lo = max(float(np.linalg.svd(C @ np.linalg.solve(
        1j * w * np.eye(A.shape[0]) - A, B), compute_uv=False)[0])
        for w in probes)
    if lo == 0.0:
        return 0.0
    hi = 2.0 * lo
    while _imag_eigs(A, B, C, hi):
        hi *= 2.0
        if hi > 1e16:
            raise ValueError("bisection upper bound diverged")
    while hi - lo > tol * lo:
        mid = 0.5 * (lo + hi)
        if _imag_eigs(A, B, C, mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
