"""Damped Gauss-Newton for small overdetermined nonlinear systems.

The corrector equations of both norm branches are overdetermined by one but
consistent (an exact solution exists), so plain Gauss-Newton converges
quadratically near a solution.  A residual-norm backtracking guard keeps the
iteration from overshooting when started from a coarse grid point.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import NDArray

__all__ = ["GaussNewtonResult", "gauss_newton"]


@dataclass(frozen=True)
class GaussNewtonResult:
    x: NDArray[np.float64]
    converged: bool
    iterations: int
    residual_norm: float


def gauss_newton(residual: Callable[[NDArray], NDArray],
                 jacobian: Callable[[NDArray], NDArray],
                 x0,
                 tol: float = 1e-12,
                 max_iter: int = 30) -> GaussNewtonResult:
    """Minimize ||residual(x)|| by Gauss-Newton with step halving.

    Stops when the residual norm drops below ``tol`` or after ``max_iter``
    iterations.  The Jacobian is the plain derivative of the residual;
    steps solve the linear least-squares system J dx = -r.
    """
    x = np.array(x0, dtype=float)
    r = residual(x)
    rnorm = float(np.linalg.norm(r))
    for it in range(max_iter):
        if rnorm < tol:
            return GaussNewtonResult(x, True, it, rnorm)
        J = jacobian(x)
        dx = np.linalg.lstsq(J, -r, rcond=None)[0]
        step = 1.0
        for _ in range(25):
            x_new = x + step * dx
            r_new = residual(x_new)
            rnorm_new = float(np.linalg.norm(r_new))
            if rnorm_new < rnorm:
                break
            step *= 0.5
        else:
            # no progress in any damped step, give up here
            return GaussNewtonResult(x, rnorm < tol, it, rnorm)
        x, r, rnorm = x_new, r_new, rnorm_new
    return GaussNewtonResult(x, rnorm < tol, max_iter, rnorm)
