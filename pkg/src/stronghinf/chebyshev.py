"""Chebyshev collocation primitives: extreme points, differentiation matrix,
barycentric interpolation rows."""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

__all__ = ["extreme_points", "differentiation_matrix", "interpolation_row"]


def extreme_points(N: int) -> NDArray[np.float64]:
    """x_k = cos(k pi / N), k = 0..N, ordered from 1 down to -1."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return np.cos(np.arange(N + 1) * np.pi / N)


def differentiation_matrix(N: int) -> NDArray[np.float64]:
    """Spectral differentiation matrix on the Chebyshev extreme points.

    Off-diagonal entries use the classical closed form; the diagonal comes
    from the negative row-sum trick, which keeps D exact on constants and
    much better conditioned than the analytic diagonal.
    """
    x = extreme_points(N)
    c = np.hstack(([2.0], np.ones(N - 1), [2.0])) * (-1.0) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D


def interpolation_row(points: NDArray[np.float64], t: float) -> NDArray[np.float64]:
    """Barycentric weights of the interpolant through Chebyshev extreme
    points ``points`` (any affine image of them, same ordering) at ``t``.

    Returns w such that p(t) = w . f for values f on the mesh.  If t hits a
    mesh point the row is the exact unit vector, avoiding the 0/0 form.
    """
    N = len(points) - 1
    w = (-1.0) ** np.arange(N + 1)
    w[0] *= 0.5
    w[N] *= 0.5
    d = t - points
    scale = max(abs(points[0] - points[N]), 1.0)
    hit = np.flatnonzero(np.abs(d) < 1e-14 * scale)
    row = np.zeros(N + 1)
    if hit.size:
        row[hit[0]] = 1.0
        return row
    q = w / d
    return q / q.sum()
