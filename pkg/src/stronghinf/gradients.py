"""Derivatives of the strong H-infinity norm in the controller parameters.

The closed loop depends affinely on p through the A matrices only, so at a
smooth maximizer the norm has the directional derivative

    d xi / d p_i = -2 xi^2 Re(v* dM/dp_i u) / (v* B B^T v + u* C^T C u),

where M is the resolvent matrix of the active branch (jwE - A0 - sum Ak
e^{-jw tau_k} at the peak frequency, or its U/V projection at the peak
angles) and (u, v) is the kernel pair of the level-set block system at the
active point.  The pair is scale-invariant in the formula and can be rebuilt
exactly from the singular vectors of the transfer matrix:

    u = M^{-1} B w_r,  v = M^{-*} C^T w_l.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .ddae import compute_nullspaces
from .interconnect import ClosedLoopTemplate
from .levelset import NormCertificate, strong_hinf
from .transfer import (delay_angle_matrix, eval_T, eval_Ta_theta,
                       singular_kernel_pair)

__all__ = ["GradientResult", "grad_strong_hinf", "finite_diff_check"]

# relative gap under which sigma_1 counts as multiple (nonsmooth point)
MULTIPLICITY_GAP = 1e-8


@dataclass(frozen=True)
class GradientResult:
    grad: NDArray[np.float64]
    branch: str               # "frequency" | "asymptotic"
    smooth: bool


def _directional(dM_parts, phases, u, v, xi, denom) -> float:
    """One gradient component; dM_parts aligned with (A0, A1, ...)."""
    dM = -dM_parts[0].astype(complex)
    for ph, dAi in zip(phases, dM_parts[1:]):
        dM = dM - dAi * ph
    return float(-2.0 * xi**2 * np.real(v.conj() @ dM @ u) / denom)


def grad_strong_hinf(template: ClosedLoopTemplate, p,
                     cert: NormCertificate) -> GradientResult:
    """Gradient of the strong norm at p, from the certificate's active point.

    At nonsmooth points (several active peaks, a sigma_1 multiplicity, or a
    branch tie) the formula is still evaluated at the reported active point
    and smooth=False marks the result as a generalized-gradient surrogate.
    """
    p = np.asarray(p, dtype=float).ravel()
    sys = template.substitute(p)
    xi = cert.value
    npar = template.n_params

    if xi <= 0.0:
        # identically zero transfer; nothing varies to first order
        return GradientResult(grad=np.zeros(npar), branch="frequency",
                              smooth=False)

    tie = abs(cert.value - cert.ta_value) <= 2.0 * cert.tol * max(1.0, cert.value)
    active = sum(1 for q in cert.peaks
                 if q.xi >= cert.value * (1.0 - cert.tol))
    smooth = active <= 1 and not (tie and cert.kind == "frequency-active")

    if cert.kind == "frequency-active":
        omega = cert.omega_hat
        M = (1j * omega) * sys.E - sys.A[0]
        phases = np.exp(-1j * omega * np.asarray(sys.delays.taus))
        for ph, Ai in zip(phases, sys.A[1:]):
            M = M - Ai * ph
        u, v = cert.u, cert.v
        if u is None or v is None:
            u, v, s = singular_kernel_pair(M, sys.B, sys.C)
        else:
            s = np.linalg.svd(eval_T(sys, 1j * omega).matrix,
                              compute_uv=False)
        if s.size > 1 and s[0] - s[1] < MULTIPLICITY_GAP * max(1.0, s[0]):
            smooth = False
        denom = float(np.real(v.conj() @ (sys.B @ (sys.B.T @ v)))
                      + np.real(u.conj() @ (sys.C.T @ (sys.C @ u))))
        grad = np.array([_directional(template.dA[k], phases, u, v, xi, denom)
                         for k in range(npar)])
        return GradientResult(grad=grad, branch="frequency", smooth=smooth)

    # asymptotic branch: same formula on the U/V-projected system
    bases = compute_nullspaces(sys)
    ta = cert.ta_result
    theta = (ta.theta_hat if ta is not None and ta.theta_hat is not None
             else cert.theta_hat)
    if bases.v == 0 or theta is None:
        return GradientResult(grad=np.zeros(npar), branch="asymptotic",
                              smooth=False)
    Ma = delay_angle_matrix(sys, bases, theta)
    Ba, Ca = bases.U.T @ sys.B, sys.C @ bases.V
    u = ta.u_a if ta is not None else None
    v = ta.v_a if ta is not None else None
    if u is None or v is None:
        u, v, s = singular_kernel_pair(Ma, Ba, Ca)
    else:
        s = np.linalg.svd(eval_Ta_theta(sys, bases, theta).matrix,
                          compute_uv=False)
    if s.size > 1 and s[0] - s[1] < MULTIPLICITY_GAP * max(1.0, s[0]):
        smooth = False
    denom = float(np.real(v.conj() @ (Ba @ (Ba.T @ v)))
                  + np.real(u.conj() @ (Ca.T @ (Ca @ u))))
    phases = np.exp(-1j * np.asarray(theta))
    U, V = bases.U, bases.V
    grad = np.empty(npar)
    for k in range(npar):
        parts = tuple(U.T @ dAi @ V for dAi in template.dA[k])
        grad[k] = _directional(parts, phases, u, v, xi, denom)
    return GradientResult(grad=grad, branch="asymptotic", smooth=smooth)


def finite_diff_check(template: ClosedLoopTemplate, p, step: float = 1e-5,
                      tol: float = 1e-6, N: int = 20) -> float:
    """Max relative deviation of the analytic gradient from central
    differences of the norm, componentwise steps scaled by 1 + |p_i|.

    The deviation is measured against the finite-difference vector's sup
    norm, which keeps near-zero components from blowing the ratio up.
    """
    p = np.asarray(p, dtype=float).ravel()
    cert = strong_hinf(template.substitute(p), tol=tol, N=N)
    g = grad_strong_hinf(template, p, cert).grad
    fd = np.empty_like(g)
    for i in range(p.size):
        h = step * (1.0 + abs(p[i]))
        lo, hi = p.copy(), p.copy()
        lo[i] -= h
        hi[i] += h
        f_hi = strong_hinf(template.substitute(hi), tol=tol, N=N).value
        f_lo = strong_hinf(template.substitute(lo), tol=tol, N=N).value
        fd[i] = (f_hi - f_lo) / (2.0 * h)
    scale = max(float(np.max(np.abs(fd))), 1e-12)
    return float(np.max(np.abs(g - fd)) / scale)
