import numpy as np
import pytest
from scipy.integrate import quad

from secgrowth.cumulants import (
    DecayBoundResult,
    MatrixState,
    commutator_truncation_residual,
    decay_product_bound,
    moments,
    nested_commutator,
    random_ops,
    random_state,
    reconstruct_moment,
    signed_subset_expansion,
    truncated,
)
from secgrowth.errors import BudgetExceeded, DimensionMismatch

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]])
SZ = np.diag([1.0, -1.0]).astype(complex)


class TestMoments:
    def test_unit_trace(self):
        st = MatrixState(np.eye(2) / 2)
        assert moments(st, [np.eye(2)], (0,)) == pytest.approx(1.0)

    def test_pauli_square(self):
        st = MatrixState(np.eye(2) / 2)
        assert moments(st, [SZ, SZ], (0, 1)) == pytest.approx(1.0)

    def test_ordering_sensitivity(self):
        st = MatrixState(np.diag([0.7, 0.3]).astype(complex))
        # tr(rho sx sy) = i tr(rho sz) = i 0.4
        assert moments(st, [SX, SY], (0, 1)) == pytest.approx(0.4j, abs=1e-14)
        assert moments(st, [SX, SY], (1, 0)) == pytest.approx(-0.4j, abs=1e-14)

    def test_dimension_mismatch(self):
        st = MatrixState(np.eye(2) / 2)
        with pytest.raises(DimensionMismatch):
            moments(st, [np.eye(3)], (0,))


class TestTruncated:
    def test_single_element_is_moment(self):
        st = random_state(3, 1)
        ops = random_ops(3, 1, 2)
        assert truncated(st, ops, (0,)) == moments(st, ops, (0,))

    def test_pair_is_covariance(self):
        st = random_state(3, 3)
        ops = random_ops(3, 2, 4)
        cov = moments(st, ops, (0, 1)) - moments(st, ops, (0,)) * moments(st, ops, (1,))
        assert truncated(st, ops, (0, 1)) == pytest.approx(cov, rel=1e-13)

    def test_product_state_factorizes(self):
        r1 = np.diag([0.6, 0.4])
        r2 = np.diag([0.2, 0.8])
        st = MatrixState(np.kron(r1, r2).astype(complex))
        A = np.kron(np.array([[0.3, 1.1], [1.1, -0.5]]), np.eye(2)).astype(complex)
        B = np.kron(np.eye(2), np.array([[0.9, 0.2], [0.2, 0.4]])).astype(complex)
        assert abs(truncated(st, [A, B], (0, 1))) < 1e-14

    @pytest.mark.parametrize("size", [2, 3, 4, 5])
    def test_moebius_consistency(self, size):
        st = random_state(3, 11)
        ops = random_ops(3, size, 12)
        J = tuple(range(size))
        assert abs(reconstruct_moment(st, ops, J) - moments(st, ops, J)) < 1e-12

    def test_budget(self):
        st = random_state(2, 1)
        ops = random_ops(2, 9, 1)
        with pytest.raises(BudgetExceeded):
            truncated(st, ops, tuple(range(9)))

    def test_unitary_conjugation_invariance(self):
        st = random_state(4, 21)
        ops = random_ops(4, 3, 22)
        rng = np.random.default_rng(23)
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        u, _ = np.linalg.qr(a)
        st2 = MatrixState(u @ st.density @ u.conj().T)
        ops2 = [u @ op @ u.conj().T for op in ops]
        for J in [(0,), (0, 1), (2, 0, 1)]:
            assert moments(st2, ops2, J) == pytest.approx(moments(st, ops, J), abs=1e-12)
            assert truncated(st2, ops2, J) == pytest.approx(
                truncated(st, ops, J), abs=1e-12
            )


class TestNestedCommutator:
    def test_single_commutator(self):
        ops = random_ops(3, 2, 5)
        expected = ops[1] @ ops[0] - ops[0] @ ops[1]
        assert np.max(np.abs(nested_commutator(ops) - expected)) < 1e-13

    def test_expansion_agrees(self):
        ops = random_ops(4, 4, 6)
        a = nested_commutator(ops)
        b = signed_subset_expansion(ops)
        assert np.max(np.abs(a - b)) < 1e-12

    def test_commuting_family_vanishes(self):
        eye = [np.eye(3, dtype=complex)] * 4
        assert np.max(np.abs(nested_commutator(eye))) == 0.0


class TestTruncationIdentity:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_residual_small(self, n):
        st = random_state(4, 30 + n)
        ops = random_ops(4, n + 1, 40 + n)
        assert commutator_truncation_residual(st, ops, n) < 1e-12

    def test_rescaling_exactness(self):
        st = random_state(3, 77)
        ops = random_ops(3, 3, 78)
        base = commutator_truncation_residual(st, ops, 2)
        lam = 3.7
        scaled = commutator_truncation_residual(
            st, [ops[0], lam * ops[1], ops[2]], 2
        )
        assert abs(scaled / lam - base) < 1e-10


class TestDecayBound:
    def test_n2_quadrature_exact(self):
        d, eps = 1.0, 0.5
        closed = 2.0 / (eps * d**eps)
        val = quad(lambda u: (abs(u) + d) ** (-1 - eps), -np.inf, np.inf, limit=400)[0]
        assert val == pytest.approx(closed, rel=1e-8)

    def test_n2_monte_carlo(self):
        res = decay_product_bound(2, 1.0, 0.5, 400_000)
        assert isinstance(res, DecayBoundResult)
        assert abs(res.estimate - res.closed_form) / res.closed_form < 0.005

    def test_n3_monte_carlo(self):
        res = decay_product_bound(3, 1.0, 0.5, 400_000)
        assert res.closed_form == pytest.approx(16.0)
        assert abs(res.estimate - 16.0) / 16.0 < 0.02

    def test_large_eps(self):
        res = decay_product_bound(3, 1.0, 10.0, 400_000)
        assert abs(res.estimate - res.closed_form) / res.closed_form < 0.02

    def test_seeded_determinism(self):
        a = decay_product_bound(3, 1.0, 0.5, 50_000, seed=5)
        b = decay_product_bound(3, 1.0, 0.5, 50_000, seed=5)
        assert a.estimate == b.estimate
