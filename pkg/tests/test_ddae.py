import numpy as np
import pytest

from stronghinf.ddae import (DdaeSystem, DelayVector, check_causality,
                             compute_nullspaces, effective_delay_indices,
                             require_causality)
from stronghinf.errors import CausalityError
from stronghinf.fixtures import neutral1, scalar_lag, benchmark_closed_loop


def test_delay_vector_sorts_and_keeps_duplicates():
    dv = DelayVector.from_values([2.0, 0.5, 0.5, 1.0])
    assert dv.taus == (0.5, 0.5, 1.0, 2.0)
    assert sorted(dv.original_indices) == [0, 1, 2, 3]


def test_delay_vector_rejects_nonpositive():
    with pytest.raises(ValueError):
        DelayVector.from_values([1.0, 0.0])
    with pytest.raises(ValueError):
        DelayVector.from_values([-0.1])


def test_system_permutes_matrices_with_delays():
    A1, A2 = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
    sys = DdaeSystem.from_matrices(np.eye(2), [np.eye(2), A1, A2],
                                   [2.0, 1.0], np.ones((2, 1)),
                                   np.ones((1, 2)))
    assert sys.delays.taus == (1.0, 2.0)
    np.testing.assert_array_equal(sys.A[1], A2)
    np.testing.assert_array_equal(sys.A[2], A1)


def test_system_shape_validation():
    with pytest.raises(ValueError):
        DdaeSystem.from_matrices(np.eye(2), [np.eye(3)], [], np.ones((2, 1)),
                                 np.ones((1, 2)))
    with pytest.raises(ValueError):
        DdaeSystem.from_matrices(np.eye(2), [np.eye(2), np.eye(2)], [],
                                 np.ones((2, 1)), np.ones((1, 2)))


def test_matrices_are_write_protected():
    sys = neutral1()
    with pytest.raises(ValueError):
        sys.E[0, 0] = 5.0


def test_nullspaces_identity_is_trivial():
    sys = DdaeSystem.from_matrices(np.eye(2), [-np.eye(2)], [],
                                   np.ones((2, 1)), np.ones((1, 2)))
    bases = compute_nullspaces(sys)
    assert bases.v == 0
    assert bases.U.shape == (2, 0)


def test_nullspaces_diagonal_case():
    bases = compute_nullspaces(neutral1())
    assert bases.v == 1
    np.testing.assert_allclose(np.abs(bases.U.ravel()), [0.0, 1.0], atol=1e-14)
    np.testing.assert_allclose(np.abs(bases.V.ravel()), [0.0, 1.0], atol=1e-14)


def test_nullspaces_benchmark_slack_loop():
    sys = benchmark_closed_loop(np.array([[-3.5878, 1.5017]]), 0.5)
    bases = compute_nullspaces(sys)
    assert sys.n == 3
    assert bases.v == 1
    assert np.linalg.norm(bases.U.T @ sys.E) <= 1e-12 * max(1.0, np.linalg.norm(sys.E))
    assert np.linalg.norm(sys.E @ bases.V) <= 1e-12 * max(1.0, np.linalg.norm(sys.E))


def test_nullspace_columns_orthonormal(rng):
    E = rng.normal(size=(5, 5))
    E[:, 2] = 0.0
    E[4, :] = 0.0
    sys = DdaeSystem.from_matrices(E, [-np.eye(5)], [], np.ones((5, 1)),
                                   np.ones((1, 5)))
    bases = compute_nullspaces(sys)
    np.testing.assert_allclose(bases.U.T @ bases.U, np.eye(bases.v), atol=1e-12)
    np.testing.assert_allclose(bases.V.T @ bases.V, np.eye(bases.v), atol=1e-12)


def test_causality_neutral1_scalar_block():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    # algebraic block is the (1,1) entry of A0 in the nullspace direction
    block = bases.U.T @ sys.A[0] @ bases.V
    assert block.shape == (1, 1)
    assert abs(abs(block[0, 0]) - 1.0) < 1e-12
    assert check_causality(sys, bases)


def test_causality_fails_on_zeroed_algebraic_row():
    A0 = np.array([[0.0, 1.0], [0.0, 0.0]])
    sys = DdaeSystem.from_matrices(np.diag([1.0, 0.0]), [A0], [],
                                   np.ones((2, 1)), np.ones((1, 2)))
    bases = compute_nullspaces(sys)
    assert not check_causality(sys, bases)
    with pytest.raises(CausalityError):
        require_causality(sys, bases)


def test_causality_trivial_for_odes():
    sys = scalar_lag()
    assert check_causality(sys, compute_nullspaces(sys))


def test_effective_delay_indices_neutral1():
    sys = neutral1()
    bases = compute_nullspaces(sys)
    assert effective_delay_indices(sys, bases) == [0, 1]


def test_effective_delay_indices_skips_vanishing_projection():
    # delayed matrix acting only on the differential part projects to zero
    E = np.diag([1.0, 0.0])
    A0 = np.array([[0.0, 1.0], [-1.0, -1.0]])
    A1 = np.array([[0.5, 0.0], [0.0, 0.0]])
    sys = DdaeSystem.from_matrices(E, [A0, A1], [1.0], np.ones((2, 1)),
                                   np.ones((1, 2)))
    bases = compute_nullspaces(sys)
    assert effective_delay_indices(sys, bases) == []
