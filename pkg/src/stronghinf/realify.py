"""Real-arithmetic views of complex corrector systems.

Both norm correctors solve for a complex singular pair (u, v) plus a few
real scalars.  Gauss-Newton runs in real arithmetic, so complex vectors are
stored as stacked [Re; Im] segments and complex-linear maps expand to the
standard 2x2 block pattern.
"""
from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

__all__ = ["clin", "ccol", "pack_pair", "unpack_pair", "gauge_fix"]


def clin(P: NDArray) -> NDArray[np.float64]:
    """Real 2d x 2d block of the complex-linear map y -> P y."""
    return np.block([[P.real, -P.imag], [P.imag, P.real]])


def ccol(w: NDArray) -> NDArray[np.float64]:
    """Stacked [Re w; Im w] column of a complex vector."""
    return np.concatenate([w.real, w.imag])


def pack_pair(u: NDArray, v: NDArray) -> NDArray[np.float64]:
    return np.concatenate([u.real, u.imag, v.real, v.imag])


def unpack_pair(x: NDArray, d: int):
    u = x[:d] + 1j * x[d:2 * d]
    v = x[2 * d:3 * d] + 1j * x[3 * d:4 * d]
    return u, v


def gauge_fix(u: NDArray, v: NDArray):
    """Normalize a kernel pair to the corrector gauge.

    Scales so that ||u||^2 + ||v||^2 = 2 and rotates the common phase so the
    largest-magnitude entry of u is real; returns (u, v, k) with k the pinned
    entry index (held fixed while iterating).
    """
    k = int(np.argmax(np.abs(u)))
    phase = np.exp(-1j * np.angle(u[k])) if abs(u[k]) > 0 else 1.0
    scale = np.sqrt(2.0 / (np.linalg.norm(u) ** 2 + np.linalg.norm(v) ** 2))
    return u * phase * scale, v * phase * scale, k
