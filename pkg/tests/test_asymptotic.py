import numpy as np
import pytest

from stronghinf.asymptotic import correct_asym, grid_sweep, strong_norm_Ta
from stronghinf.ddae import compute_nullspaces
from stronghinf.fixtures import neutral1, random_stable_ode, scalar_lag
from stronghinf.oracle import DenseSweepSpec, dense_ta
from stronghinf.transfer import eval_Ta_theta


def test_neutral1_value_is_sixteen_sevenths():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    res = strong_norm_Ta(sys, bases)
    assert res.converged
    assert res.value == pytest.approx(16.0 / 7.0, abs=1e-8)
    # maximizer: theta = (0, pi) up to 2 pi shifts
    th = np.mod(res.theta_hat, 2.0 * np.pi)
    assert min(th[0], 2.0 * np.pi - th[0]) < 1e-6
    assert th[1] == pytest.approx(np.pi, abs=1e-6)


def test_grid_value_is_a_lower_bound():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    gv, theta = grid_sweep(sys, bases)
    res = strong_norm_Ta(sys, bases)
    assert gv <= res.value + 1e-12
    assert gv == pytest.approx(16.0 / 7.0, rel=1e-2)  # 40 points per dim


def test_corrector_recovers_from_perturbed_start():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    theta0 = np.array([0.12, np.pi - 0.08])
    xi0 = eval_Ta_theta(sys, bases, theta0).sigma1
    res = correct_asym(sys, bases, theta0, xi0)
    assert res.converged
    assert res.value == pytest.approx(16.0 / 7.0, abs=1e-10)
    assert res.iterations <= 15


def test_corrected_pair_satisfies_kernel_equations():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    res = strong_norm_Ta(sys, bases)
    assert res.u_a is not None and res.v_a is not None
    from stronghinf.transfer import delay_angle_matrix
    M = delay_angle_matrix(sys, bases, res.theta_hat)
    GB = (bases.U.T @ sys.B) @ (sys.B.T @ bases.U)
    GC = (bases.V.T @ sys.C.T) @ (sys.C @ bases.V)
    assert np.linalg.norm(M @ res.u_a - GB @ res.v_a / res.value) < 1e-8
    assert np.linalg.norm(M.conj().T @ res.v_a - GC @ res.u_a / res.value) < 1e-8


def test_zero_for_nonsingular_E(rng):
    sys = random_stable_ode(rng, n=3)
    res = strong_norm_Ta(sys, compute_nullspaces(sys))
    assert res.value == 0.0
    assert res.converged


def test_zero_for_scalar_lag():
    sys = scalar_lag()
    res = strong_norm_Ta(sys, compute_nullspaces(sys))
    assert res.value == 0.0


def test_agrees_with_dense_angle_scan():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    res = strong_norm_Ta(sys, bases)
    dense = dense_ta(sys, bases, DenseSweepSpec(theta_points=200))
    assert res.value == pytest.approx(dense, abs=1e-8)
