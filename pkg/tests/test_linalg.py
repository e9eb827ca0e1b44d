import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from transinv.errors import BranchCutError, PreconditionError, RankDeficientError, ShapeError
from transinv.linalg import (
    ToleranceConfig,
    as_matrix,
    compute_svd,
    frobenius_norm,
    hadamard,
    principal_matrix_sqrt,
    pseudoinverse,
    random_orthogonal,
    smallest_singular_value,
    transpose_inverse,
)

from conftest import rel


def orth_err(Q):
    k = Q.shape[1]
    return np.linalg.norm(Q.conj().T @ Q - np.eye(k))


class TestToleranceConfig:
    def test_defaults(self):
        t = ToleranceConfig()
        assert (t.rank_rel_tol, t.residual_rel_tol, t.sqrt_axis_margin) == (1e-12, 1e-9, 1e-10)

    @pytest.mark.parametrize("field", ["rank_rel_tol", "residual_rel_tol", "sqrt_axis_margin"])
    @pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
    def test_rejects_nonpositive(self, field, bad):
        with pytest.raises(ValueError):
            ToleranceConfig(**{field: bad})


class TestAsMatrix:
    def test_promotes_ints(self):
        assert as_matrix([[1, 2]]).dtype == np.float64

    def test_rejects_nan(self):
        with pytest.raises(PreconditionError):
            as_matrix([[np.nan]])

    def test_rejects_vectors_and_empty(self):
        with pytest.raises(ShapeError):
            as_matrix([1.0, 2.0])
        with pytest.raises(ShapeError):
            as_matrix(np.zeros((0, 3)))


class TestSvd:
    def test_identity(self):
        F = compute_svd(np.eye(3))
        np.testing.assert_array_equal(F.singular_values, [1, 1, 1])
        np.testing.assert_allclose(np.abs(F.U), np.eye(3), atol=1e-15)
        np.testing.assert_allclose(F.U @ F.V.T, np.eye(3), atol=1e-15)
        assert F.rank == 3

    def test_diagonal_rank(self):
        F = compute_svd(np.diag([3.0, 0.0]))
        np.testing.assert_array_equal(F.singular_values, [3.0, 0.0])
        assert F.rank == 1

    def test_zero_matrix_rank_zero(self):
        assert compute_svd(np.zeros((2, 3))).rank == 0

    def test_random_reconstruction(self, rng):
        M = rng.standard_normal((4, 4))
        F = compute_svd(M)
        assert rel(F.reconstruct(), M) <= 1e-12
        assert orth_err(F.U) <= 1e-12 * 2 and orth_err(F.V) <= 1e-12 * 2

    def test_full_bases(self, rng):
        M = rng.standard_normal((3, 5))
        F = compute_svd(M, full=True)
        assert F.full_U.shape == (3, 3) and F.full_V.shape == (5, 5)
        assert orth_err(F.full_V) <= 1e-12 * np.sqrt(5)
        np.testing.assert_allclose(F.full_V[:, :3], F.V)

    def test_complex(self, rng):
        M = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        F = compute_svd(M)
        assert rel(F.reconstruct(), M) <= 1e-12
        assert orth_err(F.U) <= 1e-12 * np.sqrt(3)

    @settings(max_examples=40, deadline=None)
    @given(m=st.integers(1, 64), n=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
    def test_round_trip_property(self, m, n, seed):
        M = np.random.default_rng(seed).standard_normal((m, n))
        F = compute_svd(M)
        k = min(m, n)
        assert np.linalg.norm(F.reconstruct() - M) <= 1e-11 * np.linalg.norm(M)
        assert orth_err(F.U) <= 1e-12 * np.sqrt(k)
        assert orth_err(F.V) <= 1e-12 * np.sqrt(k)
        assert np.all(np.diff(F.singular_values) <= 0) and np.all(F.singular_values >= 0)


def penrose_residuals(A, P):
    scale = max(np.linalg.norm(A), 1.0)
    pscale = max(np.linalg.norm(P), 1.0)
    return [
        np.linalg.norm(A @ P @ A - A) / scale,
        np.linalg.norm(P @ A @ P - P) / pscale,
        np.linalg.norm((A @ P).T - A @ P),
        np.linalg.norm((P @ A).T - P @ A),
    ]


class TestPseudoinverse:
    def test_diagonal(self):
        np.testing.assert_array_equal(pseudoinverse(compute_svd(np.diag([2.0, 0.0]))),
                                      np.diag([0.5, 0.0]))

    def test_identity(self):
        np.testing.assert_allclose(pseudoinverse(compute_svd(np.eye(2))), np.eye(2))

    def test_rectangular(self):
        A = np.array([[2.0, 0, 0], [0, 0, 0]])
        P = pseudoinverse(compute_svd(A))
        np.testing.assert_allclose(P, [[0.5, 0], [0, 0], [0, 0]], atol=1e-15)
        assert max(penrose_residuals(A, P)) <= 1e-9

    @settings(max_examples=40, deadline=None)
    @given(m=st.integers(1, 10), n=st.integers(1, 10), data=st.data())
    def test_penrose_identities(self, m, n, data):
        r = data.draw(st.integers(0, min(m, n)))
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        A = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
        P = pseudoinverse(compute_svd(A))
        assert max(penrose_residuals(A, P)) <= 1e-9


class TestTransposeInverse:
    def test_identity(self):
        np.testing.assert_array_equal(transpose_inverse(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(transpose_inverse(np.diag([2.0, 4.0])), np.diag([0.5, 0.25]))

    def test_hand_inverted(self):
        # det = -2, inv = [[-2, 1], [1.5, -0.5]]
        np.testing.assert_allclose(transpose_inverse([[1.0, 2], [3, 4]]),
                                   [[-2, 1.5], [1, -0.5]], rtol=1e-14)

    def test_singular_carries_sigma_min(self):
        with pytest.raises(RankDeficientError) as info:
            transpose_inverse(np.diag([1.0, 0.0]))
        assert info.value.sigma_min == 0.0

    def test_conjugate(self):
        X = transpose_inverse(np.array([[2j]]), conjugate=True)
        np.testing.assert_allclose(X, [[0.5j]])

    def test_involution(self, rng):
        for _ in range(20):
            A = rng.standard_normal((6, 6)) + 3 * np.eye(6)
            assert rel(transpose_inverse(transpose_inverse(A)), A) <= 1e-9


class TestPrincipalSqrt:
    def test_scalar_multiple(self):
        np.testing.assert_allclose(principal_matrix_sqrt(4 * np.eye(2)), 2 * np.eye(2))

    def test_diagonal(self):
        X = principal_matrix_sqrt(np.diag([9.0, 1.0]))
        assert X.dtype == np.float64
        np.testing.assert_allclose(X, np.diag([3.0, 1.0]))

    def test_negative_axis(self):
        with pytest.raises(BranchCutError) as info:
            principal_matrix_sqrt(-21 * np.eye(2))
        assert "-21" in str(info.value)

    def test_zero_eigenvalue_rejected_unless_allowed(self):
        S = np.diag([0.0, 12.0])
        with pytest.raises(BranchCutError):
            principal_matrix_sqrt(S)
        np.testing.assert_allclose(principal_matrix_sqrt(S, allow_singular=True),
                                   np.diag([0.0, np.sqrt(12.0)]), atol=1e-15)

    def test_rotation_like_real_result(self):
        # eigenvalues 1 +- 2i are off the axis; the real square root exists
        S = np.array([[1.0, -2.0], [2.0, 1.0]])
        X = principal_matrix_sqrt(S)
        assert X.dtype == np.float64
        assert rel(X @ X, S) <= 1e-12
        assert np.all(np.linalg.eigvals(X).real > 0)

    @settings(max_examples=30, deadline=None)
    @given(n=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
    def test_sqrt_of_square(self, n, seed):
        rng = np.random.default_rng(seed)
        # spectrum in the open right half-plane, away from the imaginary axis
        Q = np.eye(n) + 0.3 * rng.standard_normal((n, n)) / np.sqrt(n)
        lam = rng.uniform(0.5, 3.0, n)
        X = Q @ np.diag(lam) @ np.linalg.inv(Q)
        assert rel(principal_matrix_sqrt(X @ X), X) <= 1e-8


class TestRandomOrthogonal:
    def test_one_by_one(self):
        assert abs(random_orthogonal(1, 5)[0, 0]) == 1.0

    @pytest.mark.parametrize("n", [3, 10, 33])
    def test_orthogonal(self, n):
        R = random_orthogonal(n, 7)
        assert orth_err(R) <= 1e-12 * np.sqrt(n)

    def test_deterministic(self):
        np.testing.assert_array_equal(random_orthogonal(4, 11), random_orthogonal(4, 11))
        assert not np.array_equal(random_orthogonal(4, 11), random_orthogonal(4, 12))

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            random_orthogonal(0, 1)


def test_hadamard_and_norms():
    X = np.arange(4.0).reshape(2, 2)
    np.testing.assert_array_equal(hadamard(np.eye(2), X), np.diag(np.diag(X)))
    with pytest.raises(ShapeError):
        hadamard(np.eye(2), np.eye(3))
    assert frobenius_norm(np.eye(3)) == pytest.approx(np.sqrt(3), rel=1e-15)
    F = compute_svd(np.diag([3.0, 2.0]))
    assert smallest_singular_value(F) == 2.0
    G = compute_svd(np.diag([3.0, 0.0]))
    assert smallest_singular_value(G) == 0.0
    assert smallest_singular_value(G, nonzero=True) == 3.0
