import numpy as np
import pytest

from stronghinf.ddae import compute_nullspaces
from stronghinf.fixtures import benchmark_controller, benchmark_plant
from stronghinf.interconnect import (ControllerStructure, PlantModel,
                                     build_template, interconnect)
from stronghinf.transfer import eval_T

K_H05 = np.array([-3.5878, 1.5017])


def _closed_loop_reference(K, h, lam):
    """Direct elimination of u = K x in the two-state benchmark plant."""
    A = np.array([[2.0, 1.0], [0.0, -1.0]])
    Ah = np.array([[-1.0, 0.0], [-1.0, 1.0]])
    B0 = np.array([[-0.5], [1.0]])
    B2 = np.array([[3.0], [1.0]])
    Cz = np.array([[1.0, -0.5], [0.0, 0.0]])
    Dzu = np.array([[0.0], [1.0]])
    K = np.asarray(K, dtype=float).reshape(1, 2)
    Acl = A + B2 @ K
    M = lam * np.eye(2) - Acl - Ah * np.exp(-lam * h)
    x = np.linalg.solve(M, B0)
    return (Cz + Dzu @ K) @ x


def test_benchmark_loop_structure():
    sys = interconnect(benchmark_plant(0.5), benchmark_controller(), K_H05)
    assert sys.n == 3  # two states plus the u slack variable
    np.testing.assert_array_equal(sys.E, np.diag([1.0, 1.0, 0.0]))
    # disturbance hits only the states, z reads x and the slack u
    np.testing.assert_allclose(sys.B.ravel(), [-0.5, 1.0, 0.0])
    np.testing.assert_allclose(sys.C, [[1.0, -0.5, 0.0], [0.0, 0.0, 1.0]])
    # the gains live in the undelayed matrix only
    assert sys.delays.taus == (0.5,)
    np.testing.assert_allclose(sys.A[0][2, :2], K_H05)


def test_transfer_matches_direct_elimination():
    for h in (0.1, 0.5, 1.0):
        sys = interconnect(benchmark_plant(h), benchmark_controller(), K_H05)
        for w in np.linspace(0.0, 25.0, 50):
            got = eval_T(sys, 1j * w).matrix
            ref = _closed_loop_reference(K_H05, h, 1j * w)
            np.testing.assert_allclose(got, ref, atol=1e-10)


def test_zero_controller_is_open_loop():
    sys = interconnect(benchmark_plant(0.5), benchmark_controller(), [0.0, 0.0])
    ref = _closed_loop_reference([0.0, 0.0], 0.5, 1j * 2.0)
    got = eval_T(sys, 2.0j).matrix
    np.testing.assert_allclose(got, ref, atol=1e-12)


def test_template_affinity_is_exact(rng):
    template = build_template(benchmark_plant(0.5), benchmark_controller())
    assert template.n_params == 2
    for _ in range(5):
        p = rng.uniform(-4.0, 4.0, size=2)
        direct = interconnect(benchmark_plant(0.5), benchmark_controller(), p)
        via_template = template.substitute(p)
        for Ad, At in zip(direct.A, via_template.A):
            np.testing.assert_array_equal(Ad, At)
        np.testing.assert_array_equal(direct.E, via_template.E)


def test_measurement_delay_moves_gain_to_delayed_matrix():
    ctrl = ControllerStructure(order=0, mask=[[True, True]], y_delay=0.3)
    sys = interconnect(benchmark_plant(0.5), ctrl, K_H05)
    assert 0.3 in sys.delays.taus
    idx = 1 + sys.delays.taus.index(0.3)
    np.testing.assert_allclose(sys.A[idx][2, :2], K_H05)
    assert np.allclose(sys.A[0][2, :2], 0.0)


def test_dynamic_controller_adds_states():
    # first-order controller: block [[ak, bk], [ck, dk]], all free
    ctrl = ControllerStructure(order=1, mask=np.ones((2, 3), dtype=bool))
    plant = benchmark_plant(0.5)
    template = build_template(plant, ctrl)
    assert template.n_params == 6
    assert template.const.n == 4  # x (2) + controller state + u slack


def test_fixed_entries_stay_fixed():
    ctrl = ControllerStructure(order=0, mask=[[True, False]],
                               fixed_values=[[0.0, 0.75]])
    sys = interconnect(benchmark_plant(0.5), ctrl, [-2.0])
    np.testing.assert_allclose(sys.A[0][2, :2], [-2.0, 0.75])


def test_dimension_mismatch_rejected():
    ctrl = ControllerStructure(order=0, mask=[[True]])  # 1 measurement
    with pytest.raises(ValueError):
        interconnect(benchmark_plant(0.5), ctrl, [1.0])


def test_feedthrough_free_loop_has_causal_algebraic_part():
    sys = interconnect(benchmark_plant(0.5), benchmark_controller(), K_H05)
    bases = compute_nullspaces(sys)
    assert bases.v == 1
    block = bases.U.T @ sys.A[0] @ bases.V
    assert abs(block[0, 0]) > 1e-10
