import numpy as np
import pytest

from stronghinf.newton import gauss_newton
from stronghinf.realify import ccol, clin, gauge_fix, pack_pair, unpack_pair


def test_solves_consistent_overdetermined_system():
    # circle/line intersection written with a redundant copy of one row
    def residual(x):
        return np.array([x[0] ** 2 + x[1] ** 2 - 2.0,
                         x[0] - x[1],
                         x[0] - x[1]])

    def jacobian(x):
        return np.array([[2.0 * x[0], 2.0 * x[1]],
                         [1.0, -1.0],
                         [1.0, -1.0]])

    res = gauss_newton(residual, jacobian, [2.0, 0.3])
    assert res.converged
    np.testing.assert_allclose(res.x, [1.0, 1.0], atol=1e-10)


def test_quadratic_convergence_counts():
    def residual(x):
        return np.array([np.exp(x[0]) - 2.0])

    def jacobian(x):
        return np.array([[np.exp(x[0])]])

    res = gauss_newton(residual, jacobian, [0.0])
    assert res.converged
    assert res.iterations <= 6
    assert res.x[0] == pytest.approx(np.log(2.0), abs=1e-12)


def test_reports_failure_on_inconsistent_system():
    # no root: |r| is bounded below by 1
    def residual(x):
        return np.array([x[0], 1.0])

    def jacobian(x):
        return np.array([[1.0], [0.0]])

    res = gauss_newton(residual, jacobian, [3.0], max_iter=10)
    assert not res.converged
    assert res.residual_norm >= 1.0


def test_damping_rescues_aggressive_start():
    # full steps on atan overshoot from |x| > ~1.39 and diverge undamped
    def residual(x):
        return np.array([np.arctan(x[0])])

    def jacobian(x):
        return np.array([[1.0 / (1.0 + x[0] ** 2)]])

    res = gauss_newton(residual, jacobian, [10.0])
    assert res.converged
    assert abs(res.x[0]) < 1e-10


def test_clin_matches_complex_product(rng):
    P = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    w = rng.normal(size=3) + 1j * rng.normal(size=3)
    np.testing.assert_allclose(clin(P) @ ccol(w), ccol(P @ w), atol=1e-14)


def test_pack_unpack_roundtrip(rng):
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    u2, v2 = unpack_pair(pack_pair(u, v), 4)
    np.testing.assert_array_equal(u2, u)
    np.testing.assert_array_equal(v2, v)


def test_gauge_fix_invariants(rng):
    u = rng.normal(size=3) + 1j * rng.normal(size=3)
    v = rng.normal(size=3) + 1j * rng.normal(size=3)
    u2, v2, k = gauge_fix(u, v)
    assert np.linalg.norm(u2) ** 2 + np.linalg.norm(v2) ** 2 == pytest.approx(2.0)
    assert abs(u2[k].imag) < 1e-14
    assert u2[k].real > 0
    # gauge fixing is idempotent
    u3, v3, k3 = gauge_fix(u2, v2)
    np.testing.assert_allclose(u3, u2, atol=1e-14)
    assert k3 == k
