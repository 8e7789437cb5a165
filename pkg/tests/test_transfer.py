import numpy as np
import pytest

from stronghinf.ddae import compute_nullspaces
from stronghinf.errors import NumericalFailure
from stronghinf.fixtures import neutral1, scalar_lag
from stronghinf.transfer import (eval_T, eval_Ta, eval_Ta_theta, resolvent,
                                 singular_kernel_pair, sweep)


def test_scalar_lag_matches_closed_form():
    sys = scalar_lag(a=2.0)
    for w in (0.0, 0.5, 3.0, 100.0):
        resp = eval_T(sys, 1j * w)
        expected = 1.0 / np.sqrt(4.0 + w * w)
        assert resp.sigma1 == pytest.approx(expected, rel=1e-14)
        assert resp.matrix[0, 0] == pytest.approx(1.0 / (1j * w + 2.0),
                                                  rel=1e-14)


def test_neutral1_matches_scalar_transfer():
    # eliminating the algebraic variable gives
    # (lam + 2) / (lam (1 - e^{-lam}/16 + e^{-2 lam}/2) + 1)
    sys = neutral1()
    for w in (0.3, 1.0, 1.772082902, 11.0):
        lam = 1j * w
        q = 1.0 - np.exp(-lam) / 16.0 + np.exp(-2.0 * lam) / 2.0
        expected = (lam + 2.0) / (lam * q + 1.0)
        resp = eval_T(sys, lam)
        assert resp.matrix[0, 0] == pytest.approx(expected, rel=1e-13)


def test_neutral1_asymptotic_scalar_form():
    # Ta(j w) = 1 / (1 - e^{-j w}/16 + e^{-2 j w}/2)
    sys = neutral1()
    bases = compute_nullspaces(sys)
    for w in (0.7, 2.0, np.pi):
        q = 1.0 - np.exp(-1j * w) / 16.0 + np.exp(-2j * w) / 2.0
        resp = eval_Ta(sys, bases, 1j * w)
        assert resp.sigma1 == pytest.approx(abs(1.0 / q), rel=1e-13)
    # decoupling the angles exposes the worst case 1/(1 - 1/16 - 1/2) = 16/7
    # at theta = (0, pi), which no single frequency can reach (theta2 = 2 theta1
    # along the frequency axis)
    peak = eval_Ta_theta(sys, bases, [0.0, np.pi])
    assert peak.sigma1 == pytest.approx(16.0 / 7.0, rel=1e-14)


def test_angle_form_consistent_with_frequency_form():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    w = 1.37
    theta = np.mod(w * np.array(sys.delays.taus), 2.0 * np.pi)
    a = eval_Ta(sys, bases, 1j * w)
    b = eval_Ta_theta(sys, bases, theta)
    np.testing.assert_allclose(a.matrix, b.matrix, rtol=1e-14)


def test_T_converges_to_Ta_at_high_frequency():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    gaps = []
    for w in (1e2, 1e4):
        gap = abs(eval_T(sys, 1j * w).sigma1 - eval_Ta(sys, bases, 1j * w).sigma1)
        gaps.append(gap)
    assert gaps[1] < 1e-3
    assert gaps[1] < gaps[0]


def test_asymptotic_response_is_zero_without_algebraic_part():
    sys = scalar_lag()
    bases = compute_nullspaces(sys)
    resp = eval_Ta(sys, bases, 1j * 3.0)
    assert resp.sigma1 == 0.0
    assert resp.matrix.shape == (1, 1)


def test_kernel_pair_satisfies_block_equations(rng):
    sys = neutral1()
    M = resolvent(sys, 1j * 1.772082902)
    u, v, s = singular_kernel_pair(M, sys.B, sys.C)
    xi = s[0]
    # M u = xi^{-1} B B^T v and M^* v = xi^{-1} C^T C u, by construction
    r1 = M @ u - (sys.B @ (sys.B.T @ v)) / xi
    r2 = M.conj().T @ v - (sys.C.T @ (sys.C @ u)) / xi
    assert np.linalg.norm(r1) < 1e-12
    assert np.linalg.norm(r2) < 1e-12
    # the two halves carry equal weight: ||C u|| = ||B^T v||
    assert np.linalg.norm(sys.C @ u) == pytest.approx(
        np.linalg.norm(sys.B.T @ v), rel=1e-12)


def test_transmission_pole_raises():
    # x' = w, z = x has a pole at lambda = 0
    sys_int = scalar_lag(a=0.0)
    with pytest.raises(NumericalFailure):
        eval_T(sys_int, 0j)


def test_sweep_shapes_and_values():
    sys = scalar_lag(a=1.0)
    omegas = np.array([0.0, 1.0, 2.0])
    table = sweep(sys, omegas, k=3)
    assert table.k == 1  # clamped to min(n_z, n_w)
    np.testing.assert_allclose(table.sigmas[:, 0],
                               1.0 / np.sqrt(1.0 + omegas ** 2), rtol=1e-14)
