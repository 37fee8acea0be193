import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import haar_point, power_iteration
from sparsecode.numeric import (
    dft,
    hermitian_top_eigpair,
    idft,
    nullspace_basis,
    pseudoinverse,
    svd,
)


def _cplx(r, *shape):
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


class TestSvd:
    def test_identity(self):
        _, s, _ = svd(np.eye(2))
        np.testing.assert_allclose(s, [1, 1])

    def test_zero(self):
        _, s, _ = svd(np.zeros((3, 2)))
        np.testing.assert_array_equal(s, [0, 0])

    def test_semi_unitary_has_unit_singular_values(self, rng):
        q, _ = np.linalg.qr(_cplx(rng, 4, 2))
        _, s, _ = svd(q)
        np.testing.assert_allclose(s, [1, 1], atol=1e-12)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 6), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_reconstruction(self, seed, r, c):
        m = _cplx(np.random.default_rng(seed), r, c)
        u, s, vh = svd(m)
        assert np.linalg.norm(u.conj().T @ u - np.eye(len(s))) < 1e-12
        assert np.linalg.norm(vh @ vh.conj().T - np.eye(len(s))) < 1e-12
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
        assert np.linalg.norm(u * s @ vh - m) <= 1e-10 * np.linalg.norm(m)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            svd(np.array([[np.nan, 1.0]]))


class TestNullspace:
    def test_worked_example_block(self):
        m = 0.5 * np.array([[1, -1], [-1j, 1j]])
        b = nullspace_basis(m)
        assert b.shape == (2, 1)
        target = np.array([1, 1]) / np.sqrt(2)
        assert abs(abs(np.vdot(target, b[:, 0])) - 1) < 1e-12

    def test_full_rank(self):
        assert nullspace_basis(np.eye(2)).shape == (2, 0)

    def test_zero_row(self):
        b = nullspace_basis(np.zeros((1, 3)))
        assert b.shape == (3, 3)
        np.testing.assert_allclose(b.conj().T @ b, np.eye(3), atol=1e-12)

    def test_empty_matrix_is_whole_space(self):
        assert nullspace_basis(np.zeros((0, 2))).shape == (2, 2)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 5), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_columns_are_annihilated(self, seed, rank, cols):
        r = np.random.default_rng(seed)
        rows = 6
        rank = min(rank, cols)
        m = _cplx(r, rows, rank) @ _cplx(r, rank, cols)
        tol = 1e-8
        b = nullspace_basis(m, tol)
        assert b.shape[1] == cols - rank
        for col in b.T:
            assert np.linalg.norm(m @ col) <= 10 * tol * np.linalg.norm(m)
        np.testing.assert_allclose(b.conj().T @ b, np.eye(b.shape[1]), atol=1e-12)

    def test_negative_tol(self):
        with pytest.raises(ValueError):
            nullspace_basis(np.eye(2), -1.0)


class TestPseudoinverse:
    def test_identity(self):
        np.testing.assert_allclose(pseudoinverse(np.eye(3)), np.eye(3))

    def test_diagonal_with_zero(self):
        np.testing.assert_allclose(pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    @pytest.mark.parametrize("shape", [(2, 4), (4, 2), (3, 3)])
    def test_penrose_conditions(self, rng, shape):
        m = _cplx(rng, *shape)
        x = pseudoinverse(m)
        eps = 1e-10 * np.linalg.norm(m)
        assert np.linalg.norm(m @ x @ m - m) <= eps
        assert np.linalg.norm(x @ m @ x - x) <= 1e-10 * np.linalg.norm(x)
        assert np.linalg.norm((m @ x).conj().T - m @ x) <= eps
        assert np.linalg.norm((x @ m).conj().T - x @ m) <= eps

    def test_semi_unitary_gives_conjugate_transpose(self, rng):
        w = haar_point(rng, 5, 3)
        np.testing.assert_allclose(pseudoinverse(w), w.conj().T, atol=1e-10)


class TestTopEigpair:
    def test_diagonal(self):
        lam, v = hermitian_top_eigpair(np.diag([3.0, 1.0]))
        assert lam == pytest.approx(3.0)
        assert abs(abs(v[0]) - 1) < 1e-12

    def test_rank_one(self):
        lam, v = hermitian_top_eigpair(0.5 * np.ones((2, 2)))
        assert lam == pytest.approx(1.0)
        assert abs(abs(np.vdot(v, [1, 1])) / np.sqrt(2) - 1) < 1e-12

    @pytest.mark.parametrize("seed", range(5))
    def test_against_power_iteration(self, seed):
        r = np.random.default_rng(seed)
        w = haar_point(r, 6, 3)
        idx = sorted(r.choice(6, size=4, replace=False))
        a = (w @ w.conj().T)[np.ix_(idx, idx)]
        lam, v = hermitian_top_eigpair(a)
        lam_pi, _ = power_iteration(a)
        assert lam == pytest.approx(lam_pi, abs=1e-12)
        assert np.linalg.norm(a @ v - lam * v) <= 1e-9 * max(1, abs(lam))
        assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            hermitian_top_eigpair(np.array([[1.0, 1.0], [0.0, 1.0]]))

    def test_non_square_rejected(self):
        with pytest.raises(ValueError):
            hermitian_top_eigpair(np.ones((2, 3)))


class TestDft:
    def test_dc(self):
        np.testing.assert_allclose(dft(np.ones(4)), [2, 0, 0, 0], atol=1e-15)

    def test_delta(self):
        x = np.zeros(8)
        x[0] = 1
        np.testing.assert_allclose(dft(x), np.full(8, 1 / np.sqrt(8)))

    @given(st.integers(0, 2**32 - 1), st.integers(1, 8192))
    @settings(max_examples=30, deadline=None)
    def test_round_trip_and_parseval(self, seed, n):
        x = _cplx(np.random.default_rng(seed), n)
        y = dft(x)
        assert np.linalg.norm(y) == pytest.approx(np.linalg.norm(x), rel=1e-12)
        assert np.linalg.norm(idft(y) - x) <= 1e-10 * np.linalg.norm(x)
