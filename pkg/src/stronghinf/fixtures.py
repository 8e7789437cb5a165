"""Benchmark systems used by tests, docs and the bundled input files.

``neutral1`` is the scalar neutral example with transfer function
(lambda + 2) / (lambda (1 - 1/16 e^{-lambda tau1} + 1/2 e^{-lambda tau2}) + 1);
its asymptotic strong norm is exactly 16/7.  ``benchmark_plant`` is the
two-state unstable plant with one state delay whose static output-feedback
benchmark values are reproduced by the acceptance tests.
"""
from __future__ import annotations

import numpy as np

from .ddae import DdaeSystem
from .interconnect import ControllerStructure, PlantModel

__all__ = ["neutral1", "scalar_lag", "benchmark_plant", "benchmark_controller",
           "benchmark_closed_loop", "random_stable_retarded", "random_stable_ode"]


def neutral1(tau1: float = 1.0, tau2: float = 2.0) -> DdaeSystem:
    """Scalar neutral benchmark in descriptor form (n = 2, v = 1)."""
    return DdaeSystem.from_matrices(
        E=[[1.0, 0.0], [0.0, 0.0]],
        A=[[[0.0, 1.0], [-1.0, -1.0]],
           [[0.0, 0.0], [0.0, 1.0 / 16.0]],
           [[0.0, 0.0], [0.0, -0.5]]],
        delays=[tau1, tau2],
        B=[[0.0], [1.0]],
        C=[[2.0, 1.0]],
    )


def scalar_lag(a: float = 1.0) -> DdaeSystem:
    """x' = -a x + w, z = x; H-infinity norm 1/a at omega = 0."""
    return DdaeSystem.from_matrices(E=[[1.0]], A=[[[-a]]], delays=[],
                                    B=[[1.0]], C=[[1.0]])


def benchmark_plant(h: float = 0.5) -> PlantModel:
    """Unstable two-state plant with delayed state feedback path.

    x' = A x + Ah x(t-h) + Bw w + Bu u;  z = (x1 - 0.5 x2, u);  y = x.
    """
    return PlantModel(
        A=[[2.0, 1.0], [0.0, -1.0]],
        Ad=[(h, [[-1.0, 0.0], [-1.0, 1.0]])],
        B0=[[-0.5], [1.0]],
        B2=[[3.0], [1.0]],
        Cz=[[1.0, -0.5], [0.0, 0.0]],
        Dzu=[[0.0], [1.0]],
        Cy=np.eye(2),
    )


def benchmark_controller() -> ControllerStructure:
    """Static output feedback u = K y with both gains free."""
    return ControllerStructure(order=0, mask=[[True, True]])


def benchmark_closed_loop(K, h: float = 0.5) -> DdaeSystem:
    from .interconnect import interconnect
    return interconnect(benchmark_plant(h), benchmark_controller(), K)


def random_stable_retarded(rng: np.random.Generator, n: int = 3,
                           m: int = 1, n_w: int = 1, n_z: int = 1) -> DdaeSystem:
    """Random retarded system (E = I) that is strongly stable by construction.

    The undelayed matrix is shifted so its log norm dominates the combined
    delayed-term norms, which bounds every characteristic root away from the
    imaginary axis regardless of the delay values.
    """
    A_delayed = [0.4 * rng.normal(size=(n, n)) / max(m, 1) for _ in range(m)]
    R = rng.normal(size=(n, n))
    mu = float(np.linalg.eigvalsh((R + R.T) / 2.0).max())
    shift = mu + sum(np.linalg.norm(Ai, 2) for Ai in A_delayed) + 0.5
    A0 = R - shift * np.eye(n)
    delays = rng.uniform(0.2, 2.0, size=m)
    B = rng.normal(size=(n, n_w))
    C = rng.normal(size=(n_z, n))
    return DdaeSystem.from_matrices(np.eye(n), [A0] + A_delayed, delays, B, C)


def random_stable_ode(rng: np.random.Generator, n: int = 4,
                      n_w: int = 2, n_z: int = 2) -> DdaeSystem:
    """Random stable delay-free system (E = I, m = 0)."""
    R = rng.normal(size=(n, n))
    mu = float(np.linalg.eigvalsh((R + R.T) / 2.0).max())
    A0 = R - (mu + 0.5) * np.eye(n)
    B = rng.normal(size=(n, n_w))
    C = rng.normal(size=(n_z, n))
    return DdaeSystem.from_matrices(np.eye(n), [A0], [], B, C)
