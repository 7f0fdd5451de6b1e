import math

import numpy as np
import pytest

from transport.errors import NegativeEigenvalueError, NotHermitianError, ShapeError, TraceError
from transport.qmat import ket, swap
from transport.sampling import haar_unitary, hs_state
from transport.states import (
    BipartiteState,
    DensityMatrix,
    bell_state,
    is_ppt,
    min_partial_transpose_eigenvalue,
    mutual_information,
    mutual_information_change,
    partial_transpose,
    validate,
    von_neumann_entropy,
    zero_gap_entangled_state,
)


def h(p):
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


class TestValidate:
    def test_maximally_mixed_qubit(self):
        rho = validate(np.eye(2) / 2)
        np.testing.assert_allclose(rho.spectrum, [0.5, 0.5])

    def test_ground_state(self):
        np.testing.assert_allclose(validate(np.diag([1.0, 0.0])).spectrum, [1.0, 0.0])

    def test_negative_eigenvalue(self):
        with pytest.raises(NegativeEigenvalueError):
            validate(np.diag([1.5, -0.5]))

    def test_not_hermitian(self):
        with pytest.raises(NotHermitianError):
            validate([[0.5, 0.1], [0.0, 0.5]])

    def test_bad_trace(self):
        with pytest.raises(TraceError):
            validate(np.diag([0.5, 0.4]))

    def test_non_square(self):
        with pytest.raises(ShapeError):
            validate(np.ones((2, 3)) / 3)

    def test_tiny_negative_eigenvalue_is_clipped(self):
        rho = validate(np.diag([1.0 + 5e-11, -5e-11]))
        assert rho.spectrum.min() >= 0.0
        assert rho.spectrum.sum() == pytest.approx(1.0, abs=1e-15)


def test_bipartite_dimension_mismatch():
    with pytest.raises(ShapeError):
        BipartiteState(2, 3, DensityMatrix.maximally_mixed(4))


class TestEntropy:
    def test_pure_state(self):
        assert von_neumann_entropy(DensityMatrix.from_ket([1, 1j])) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_maximally_mixed(self, d):
        assert von_neumann_entropy(DensityMatrix.maximally_mixed(d)) == pytest.approx(math.log(d))

    def test_diagonal_qubit(self):
        expected = 0.75 * math.log(4 / 3) + 0.25 * math.log(4)
        assert von_neumann_entropy(validate(np.diag([0.75, 0.25]))) == pytest.approx(expected)

    def test_unitary_invariance(self, rng):
        rho = hs_state(4, rng.child(0))
        u = haar_unitary(4, rng.child(1))
        rotated = validate(u @ rho.mat @ u.conj().T)
        assert von_neumann_entropy(rotated) == pytest.approx(von_neumann_entropy(rho), abs=1e-10)


class TestMutualInformation:
    def test_product_state(self):
        s = BipartiteState.product(validate(np.diag([0.6, 0.4])), validate(np.diag([0.1, 0.2, 0.7])))
        assert mutual_information(s) == pytest.approx(0.0, abs=1e-12)

    def test_bell_state(self):
        assert mutual_information(bell_state()) == pytest.approx(2 * math.log(2))

    def test_zero_gap_entangled_state(self):
        # marginais diag(3/4, 1/4), espectro global (1/2, 1/2, 0, 0)
        expected = 2 * h(0.75) - math.log(2)
        assert mutual_information(zero_gap_entangled_state()) == pytest.approx(expected, abs=1e-12)

    def test_subadditivity_on_samples(self, rng):
        for k in range(20):
            s = BipartiteState(2, 3, hs_state(6, rng.child(k)))
            assert mutual_information(s) >= -1e-9


class TestMutualInformationChange:
    def test_identity(self):
        assert mutual_information_change(bell_state(), np.eye(4)) == pytest.approx(0.0, abs=1e-12)

    def test_swap_on_product(self):
        rho = validate(np.diag([0.8, 0.2]))
        sigma = validate(np.diag([0.35, 0.65]))
        s = BipartiteState.product(rho, sigma)
        assert mutual_information_change(s, swap(2, 2)) == pytest.approx(0.0, abs=1e-12)

    def test_phase_unitary_on_bell(self):
        u = np.diag(np.exp(1j * np.array([0.3, 1.1, -0.4, 2.0])))
        assert mutual_information_change(bell_state(), u) == pytest.approx(0.0, abs=1e-12)

    def test_matches_global_difference(self, rng):
        for k in range(10):
            s = BipartiteState(2, 2, hs_state(4, rng.child(k)))
            u = haar_unitary(4, rng.child(100 + k))
            expected = mutual_information(s.evolve(u)) - mutual_information(s)
            assert mutual_information_change(s, u) == pytest.approx(expected, abs=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            mutual_information_change(bell_state(), np.eye(3))


class TestPeres:
    def test_product_state_is_ppt(self):
        s = BipartiteState.product(validate(np.diag([0.6, 0.4])), DensityMatrix.from_ket([1, 1j]))
        assert is_ppt(s)
        assert np.linalg.eigvalsh(partial_transpose(s))[0] >= -1e-12

    def test_bell_state(self):
        assert min_partial_transpose_eigenvalue(bell_state()) == pytest.approx(-0.5)
        assert not is_ppt(bell_state())

    def test_maximally_mixed_unchanged(self):
        s = BipartiteState(2, 2, DensityMatrix.maximally_mixed(4))
        np.testing.assert_allclose(partial_transpose(s), np.eye(4) / 4)

    def test_zero_gap_state_is_entangled(self):
        s = zero_gap_entangled_state()
        assert min_partial_transpose_eigenvalue(s) == pytest.approx((0.5 - math.sqrt(0.5)) / 2, abs=1e-12)
        assert not is_ppt(s)


def test_from_ket_normalizes():
    rho = DensityMatrix.from_ket(2 * ket(1, 3))
    assert rho.purity == pytest.approx(1.0)
    assert np.real(rho.mat[1, 1]) == pytest.approx(1.0)
