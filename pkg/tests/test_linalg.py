"""Tests for the dense linear-algebra primitives."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import linear_sum_assignment

from gamma_contract.linalg import (
    NoPrimarySqrt,
    NotHermitian,
    NotPSD,
    _common_flag,
    _triangular_enough,
    eigenvalue_clusters,
    joint_spectrum,
    numerical_radius,
    op_norm,
    operator_modulus,
    primary_sqrt,
    psd_sqrt,
    spectral_radius,
)
from gamma_contract.models import NotCommuting, Tolerances

from .conftest import random_contraction, random_unitary

E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def abs_s(pair):
    return abs(pair[0])


class TestNorms:
    """Tests for operator norm and spectral radius."""

    @pytest.mark.parametrize(
        "matrix,expected",
        [
            (np.zeros((2, 2)), 0.0),
            (np.eye(3), 1.0),
            (E12, 1.0),
            ([[1, 1], [0, 0]], math.sqrt(2)),
            (np.diag([1j, -3]), 3.0),
        ],
    )
    def test_op_norm(self, matrix, expected: float):
        """The operator norm is the largest singular value."""
        assert op_norm(np.asarray(matrix, dtype=complex)) == pytest.approx(expected)

    def test_spectral_radius_of_nilpotent_is_zero(self):
        """A nilpotent matrix has spectral radius 0 but norm 1."""
        assert spectral_radius(E12) == pytest.approx(0.0, abs=1e-12)
        assert op_norm(E12) == 1.0

    def test_spectral_radius_below_norm(self, rng):
        """r(A) <= ||A|| for random matrices."""
        for _ in range(10):
            A = random_contraction(rng, 4, 1.5)
            assert spectral_radius(A) <= op_norm(A) + 1e-12


class TestNumericalRadius:
    """Tests for the numerical radius."""

    def test_nilpotent(self):
        """ω([[0, 1], [0, 0]]) = 1/2."""
        assert numerical_radius(E12) == pytest.approx(0.5, abs=1e-12)

    def test_hermitian_equals_spectral_radius(self, rng):
        """For Hermitian matrices ω(A) = r(A) = ||A||."""
        A = random_contraction(rng, 5, 1.0)
        H = (A + A.conj().T) / 2
        assert numerical_radius(H) == pytest.approx(op_norm(H), abs=1e-10)

    @pytest.mark.parametrize("epsilon", [0.5, 1 / 1.3, 1.0])
    def test_epsilon_matrix(self, epsilon: float):
        """ω(ε[[1, 1], [0, 0]]) = ε(√2 + 1)/2."""
        S = epsilon * np.array([[1, 1], [0, 0]], dtype=complex)
        expected = epsilon * (math.sqrt(2) + 1) / 2
        assert numerical_radius(S) == pytest.approx(expected, abs=1e-10)

    @pytest.mark.parametrize("a,b", [(0.3, 1.0), (1j, 0.5), (-0.2 + 0.1j, 2.0)])
    def test_jordan_type_block(self, a: complex, b: complex):
        """ω([[a, b], [0, a]]) = |a| + |b|/2."""
        A = np.array([[a, b], [0, a]], dtype=complex)
        assert numerical_radius(A) == pytest.approx(abs(a) + abs(b) / 2, abs=1e-10)

    def test_bounds(self, rng):
        """||A||/2 <= ω(A) <= ||A||."""
        for _ in range(10):
            A = random_contraction(rng, 4, 1.0)
            w = numerical_radius(A)
            assert 0.5 - 1e-12 <= w <= 1.0 + 1e-12

    def test_scalar(self):
        """ω of a 1x1 matrix is the modulus of its entry."""
        assert numerical_radius(np.array([[3 - 4j]])) == 5.0

    @pytest.mark.slow
    def test_brute_force_lower_bound(self, rng):
        """max |x*Ax| over 10^5 random unit vectors never exceeds ω(A)."""
        for n in (2, 3, 4):
            for _ in range(10):
                A = random_contraction(rng, n, 1.0) + 0.3 * np.eye(n)
                X = rng.standard_normal((100_000, 2 * n)).view(complex)
                X /= np.linalg.norm(X, axis=1, keepdims=True)
                brute = np.abs(np.einsum("ki,ij,kj->k", X.conj(), A, X)).max()
                w = numerical_radius(A)
                assert brute <= w + 1e-10
                if n == 2:
                    assert w - brute <= 1e-2 * op_norm(A)


class TestPsdSqrt:
    """Tests for the PSD square root."""

    def test_square_root_squares_back(self, rng):
        """psd_sqrt(A)^2 = A for a random PSD matrix."""
        B = random_contraction(rng, 4, 1.0)
        A = B.conj().T @ B
        R = psd_sqrt(A)
        assert_allclose(R @ R, A, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(R) >= -1e-12)

    def test_not_hermitian(self):
        """Non-Hermitian input raises NotHermitian."""
        with pytest.raises(NotHermitian):
            psd_sqrt(E12)

    def test_negative_eigenvalue(self):
        """A clearly negative eigenvalue raises NotPSD."""
        with pytest.raises(NotPSD):
            psd_sqrt(np.diag([1.0, -0.1]))

    def test_operator_modulus_matches_psd_sqrt(self, rng):
        """|M| from the SVD agrees with psd_sqrt(M*M)."""
        M = random_contraction(rng, 4, 2.0)
        assert_allclose(operator_modulus(M), psd_sqrt(M.conj().T @ M), atol=1e-10)


class TestPrimarySqrt:
    """Tests for primary square roots with branch selection."""

    def test_principal_root_of_diagonal(self):
        """The default branch takes principal roots."""
        assert_allclose(primary_sqrt(np.diag([4.0, 9.0])), np.diag([2, 3]), atol=1e-12)

    def test_branch_signs_flip_clusters(self):
        """A -1 sign negates the root on that eigenvalue cluster."""
        R = primary_sqrt(np.diag([4.0, 9.0]), branch_signs=[-1, 1])
        assert_allclose(R, np.diag([-2, 3]), atol=1e-12)

    def test_clusters_sorted(self):
        """Clusters are listed in the order branch_signs refers to."""
        clusters = eigenvalue_clusters(np.diag([9.0, 4.0, 9.0]))
        assert clusters == pytest.approx([4.0, 9.0])

    def test_wrong_sign_count(self):
        """One sign per cluster is required."""
        with pytest.raises(ValueError, match="Expected 2 branch signs"):
            primary_sqrt(np.diag([4.0, 9.0]), branch_signs=[1])

    def test_invalid_sign(self):
        """Signs must be +1 or -1."""
        with pytest.raises(ValueError, match="must be \\+1 or -1"):
            primary_sqrt(np.diag([4.0, 9.0]), branch_signs=[1, 2])

    def test_nonzero_nilpotent_has_no_root(self):
        """[[0, 1], [0, 0]] has no square root at all."""
        with pytest.raises(NoPrimarySqrt):
            primary_sqrt(E12)

    def test_zero_matrix(self):
        """The zero matrix is its own primary root."""
        assert_allclose(primary_sqrt(np.zeros((2, 2))), np.zeros((2, 2)))

    def test_non_normal_root(self, rng):
        """Random non-normal matrices square back and commute with the input."""
        M = random_contraction(rng, 4, 1.0) + 2 * np.eye(4)
        R = primary_sqrt(M)
        assert_allclose(R @ R, M, atol=1e-10)
        assert op_norm(R @ M - M @ R) <= 1e-10

    def test_root_lies_in_bicommutant(self, rng):
        """The root commutes with everything that commutes with the input."""
        U = random_unitary(rng, 3)
        Uh = U.conj().T
        M = U @ np.diag([4.0, 4.0, 9.0]) @ Uh
        X = np.zeros((3, 3), dtype=complex)
        X[:2, :2] = random_contraction(rng, 2, 1.0)
        X[2, 2] = 0.5
        X = U @ X @ Uh
        assert op_norm(M @ X - X @ M) <= 1e-12
        for signs in ([1, 1], [-1, 1], [1, -1]):
            R = primary_sqrt(M, branch_signs=signs)
            assert op_norm(R @ X - X @ R) <= 1e-9

    def test_polynomials_commute_with_root(self, rng):
        """Polynomials in a non-normal input commute with its root."""
        for n in range(1, 6):
            M = random_contraction(rng, n, 0.8) + 1.5 * np.eye(n)
            X = M @ M - 3 * M + 0.5j * np.eye(n)
            R = primary_sqrt(M)
            assert op_norm(R @ X - X @ R) <= 1e-9


class TestJointSpectrum:
    """Tests for simultaneous triangularization."""

    def test_diagonal_pair(self):
        """Diagonal pairs yield their diagonal entries paired up."""
        found = joint_spectrum(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        pairs = sorted(found, key=abs_s)
        assert [p[0] for p in pairs] == pytest.approx([1.0, 2.0])
        assert [p[1] for p in pairs] == pytest.approx([3.0, 4.0])

    def test_conjugated_pair(self, rng):
        """Pairs are recovered after a unitary change of basis."""
        U = random_unitary(rng, 3)
        Uh = U.conj().T
        S = U @ np.diag([0.5, -1.0, 1j]) @ Uh
        P = U @ np.diag([0.25, 2.0, -1.0]) @ Uh
        found = sorted(joint_spectrum(S, P), key=lambda sp: sp[1].real)
        expected = [(1j, -1.0), (0.5, 0.25), (-1.0, 2.0)]
        for (s, p), (s0, p0) in zip(found, expected):
            assert abs(s - s0) <= 1e-10 and abs(p - p0) <= 1e-10

    def test_shared_eigenvalue_of_s(self):
        """Repeated eigenvalues of S still pair with the right eigenvalues of P."""
        pairs = joint_spectrum(np.eye(2), np.diag([0.1, 0.2]))
        assert sorted(p[1].real for p in pairs) == pytest.approx([0.1, 0.2])

    def test_non_commuting(self):
        """Non-commuting input raises NotCommuting."""
        with pytest.raises(NotCommuting):
            joint_spectrum(E12, E12.T)

    def test_multiset_matches_polynomial_pairs(self, rng):
        """Pairs (A + A², A/2) give exactly the pairs (λ + λ², λ/2) of σ(A)."""
        for trial in range(50):
            n = 1 + trial % 5
            A = random_contraction(rng, n, 1.0)
            S, P = A + A @ A, 0.5 * A
            lam = np.linalg.eigvals(A)
            expected = np.column_stack([lam + lam**2, 0.5 * lam])
            found = np.array(joint_spectrum(S, P))
            cost = np.abs(found[:, None, 0] - expected[None, :, 0]) + np.abs(
                found[:, None, 1] - expected[None, :, 1]
            )
            rows, cols = linear_sum_assignment(cost)
            assert cost[rows, cols].max() <= 1e-8


class TestCommonFlag:
    """Tests for the deflation fallback of joint triangularization."""

    def test_jordan_block_pair(self, tol):
        """A Jordan block and a polynomial in it share one eigenvector."""
        S = np.array([[1, 1], [0, 1]], dtype=complex)
        P = np.array([[2, 3], [0, 2]], dtype=complex)
        Z = _common_flag(S, P, tol)
        assert_allclose(Z.conj().T @ Z, np.eye(2), atol=1e-12)
        assert _triangular_enough(S, P, Z, tol)

    def test_repeated_eigenvalue_pair(self, rng, tol):
        """A repeated eigenvalue of S is split by the eigenvectors of P."""
        U = random_unitary(rng, 3)
        Uh = U.conj().T
        S = U @ np.diag([1.0, 1.0, 2.0]) @ Uh
        P = U @ np.diag([0.1, 0.2, 0.3]) @ Uh
        Z = _common_flag(S, P, tol)
        assert_allclose(Z.conj().T @ Z, np.eye(3), atol=1e-12)
        assert _triangular_enough(S, P, Z, tol)

    def test_scalar_pair(self, tol):
        """1x1 input needs no change of basis."""
        Z = _common_flag(np.array([[2.0 + 0j]]), np.array([[0.5 + 0j]]), tol)
        assert_allclose(Z, np.eye(1))

    def test_joint_spectrum_of_jordan_pair(self):
        """The Jordan pair reads off (1, 2) twice."""
        S = np.array([[1, 1], [0, 1]], dtype=complex)
        P = np.array([[2, 3], [0, 2]], dtype=complex)
        for s, p in joint_spectrum(S, P, Tolerances()):
            assert abs(s - 1) <= 1e-6 and abs(p - 2) <= 1e-6
