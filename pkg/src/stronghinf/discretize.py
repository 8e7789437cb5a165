"""Spectral discretization of a DDAE on the delay interval.

The infinite-dimensional system is approximated on [-tau_max, 0] with a
Chebyshev collocation mesh t_k (t_0 = 0).  The discrete state stacks the
solution segment at the mesh points; the block row at t_0 enforces the
system equation with delayed values read off by barycentric interpolation,
the remaining block rows collocate d/dt along the segment:

    E_N z' = A_N z + B_N w,    z_N = C_N z.

T_N(lambda) = C_N (lambda E_N - A_N)^{-1} B_N converges to T(lambda)
spectrally fast in N at fixed lambda.  The generalized eigenvalues of
(E_N, A_N) approximate characteristic roots, which gives the stability
barrier used before any norm computation.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.optimize import minimize

from .chebyshev import differentiation_matrix, extreme_points, interpolation_row
from .ddae import DdaeSystem, NullspaceBases, effective_delay_indices
from .transfer import FrequencyResponse, _response

__all__ = ["DiscretizedSystem", "discretize", "eval_TN",
           "StabilityReport", "strong_stability_check", "spectral_abscissa"]

ABSCISSA_MARGIN = -1e-8


@dataclass(frozen=True)
class DiscretizedSystem:
    """Finite-dimensional collocation approximation of a DDAE."""

    EN: NDArray[np.float64]
    AN: NDArray[np.float64]
    BN: NDArray[np.float64]
    CN: NDArray[np.float64]
    N: int
    mesh: NDArray[np.float64]
    n: int  # state dimension of the underlying DDAE


def discretize(sys: DdaeSystem, N: int) -> DiscretizedSystem:
    """Build (E_N, A_N, B_N, C_N) of size (N+1) n.

    For a delay-free system the history blocks are inert and T_N equals T
    exactly for any N; a unit interval stands in for the empty delay span.
    """
    if N < 2:
        raise ValueError("N must be >= 2")
    n = sys.n
    tau_max = sys.delays.tau_max if sys.m else 1.0
    mesh = (extreme_points(N) - 1.0) * (tau_max / 2.0)  # t_0 = 0, t_N = -tau_max
    dim = n * (N + 1)

    EN = np.zeros((dim, dim))
    EN[:n, :n] = sys.E
    for k in range(1, N + 1):
        EN[n * k:n * (k + 1), n * k:n * (k + 1)] = np.eye(n)

    AN = np.zeros((dim, dim))
    AN[:n, :n] = sys.A[0]
    for tau, Ai in zip(sys.delays.taus, sys.A[1:]):
        row = interpolation_row(mesh, -tau)
        for k in np.flatnonzero(np.abs(row) > 0.0):
            AN[:n, n * k:n * (k + 1)] += Ai * row[k]

    # d/dt on the mesh: chain rule of the affine map [-tau_max,0] <- [-1,1]
    D = differentiation_matrix(N) * (2.0 / tau_max)
    for k in range(1, N + 1):
        for l in range(N + 1):
            if D[k, l] != 0.0:
                AN[n * k:n * (k + 1), n * l:n * (l + 1)] = D[k, l] * np.eye(n)

    BN = np.zeros((dim, sys.n_w))
    BN[:n] = sys.B
    CN = np.zeros((sys.n_z, dim))
    CN[:, :n] = sys.C
    return DiscretizedSystem(EN=EN, AN=AN, BN=BN, CN=CN, N=N, mesh=mesh, n=n)


def eval_TN(dsys: DiscretizedSystem, lam: complex) -> FrequencyResponse:
    """Evaluate T_N(lambda) on the collocation pencil."""
    lam = complex(lam)
    M = lam * dsys.EN - dsys.AN
    return _response(lam, M, dsys.BN, dsys.CN, "discretized resolvent")


def spectral_abscissa(dsys: DiscretizedSystem) -> float:
    """Largest real part over the finite eigenvalues of (E_N, A_N)."""
    alpha, beta = scipy.linalg.eig(dsys.AN, dsys.EN, right=False,
                                   homogeneous_eigvals=True)
    finite = np.abs(beta) > 1e-12 * (1.0 + np.abs(alpha))
    lam = alpha[finite] / beta[finite]
    lam = lam[np.abs(lam) < 1e8]
    if lam.size == 0:
        return -np.inf
    return float(lam.real.max())


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    abscissa: float
    delta_radius: float


def _difference_radius(sys: DdaeSystem, bases: NullspaceBases,
                       grid_per_dim: int = 32) -> float:
    """max over angles of rho((U^T A0 V)^{-1} sum U^T Ai V e^{j theta_i}).

    This is the spectral radius of the associated delay-difference equation;
    values below 1 make the algebraic/neutral part robustly stable under
    delay perturbations.  Grid scan plus a local polish; independent of the
    actual tau values.
    """
    if bases.v == 0:
        return 0.0
    eff = effective_delay_indices(sys, bases)
    if not eff:
        return 0.0
    P = np.linalg.inv(bases.U.T @ sys.A[0] @ bases.V)
    blocks = [P @ (bases.U.T @ sys.A[i + 1] @ bases.V) for i in eff]

    def rho(theta):
        M = np.zeros_like(blocks[0], dtype=complex)
        for th, G in zip(theta, blocks):
            M = M + G * np.exp(1j * th)
        return float(np.abs(np.linalg.eigvals(M)).max())

    grid = np.linspace(0.0, 2.0 * np.pi, grid_per_dim, endpoint=False)
    best, best_theta = -1.0, None
    for theta in np.stack(np.meshgrid(*([grid] * len(eff)), indexing="ij"),
                          axis=-1).reshape(-1, len(eff)):
        r = rho(theta)
        if r > best:
            best, best_theta = r, theta
    res = minimize(lambda th: -rho(th), best_theta, method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    return max(best, float(-res.fun))


def strong_stability_check(sys: DdaeSystem, bases: NullspaceBases,
                           N: int = 20) -> StabilityReport:
    """Strong exponential stability barrier.

    Two parts: the rightmost finite eigenvalue of the collocation pencil
    must sit strictly in the left half plane, and the delay-difference part
    must have spectral radius < 1 (the discretization alone cannot certify
    the neutral eigenvalue chains).
    """
    radius = _difference_radius(sys, bases)
    abscissa = spectral_abscissa(discretize(sys, N))
    stable = bool(abscissa < ABSCISSA_MARGIN and radius < 1.0)
    return StabilityReport(stable=stable, abscissa=abscissa, delta_radius=radius)
