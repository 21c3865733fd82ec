"""Tests for symmetrization, decomposition and the doubling embedding."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from gamma_contract.analysis import is_gamma_contraction
from gamma_contract.linalg import op_norm
from gamma_contract.models import (
    DecompositionStatus,
    NotCommuting,
    OperatorPair,
    ScaleDirection,
)
from gamma_contract.symmetrization import (
    NotGammaContraction,
    branch_decompositions,
    decompose,
    embed_and_split,
    factorization_search,
    half_embedding,
    half_scale,
    symmetrize_ops,
)

from .conftest import random_contraction

E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def assert_symmetrizes(T1, T2, pair: OperatorPair, atol: float = 1e-10):
    assert_allclose(T1 + T2, pair.S, atol=atol)
    assert_allclose(T1 @ T2, pair.P, atol=atol)
    assert op_norm(T1 @ T2 - T2 @ T1) <= atol


class TestSymmetrizeOps:
    """Tests for (T1, T2) -> (T1 + T2, T1 T2)."""

    def test_diagonal_factors(self):
        """Sum and product are taken entrywise for diagonal factors."""
        pair = symmetrize_ops(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))
        assert_allclose(pair.S, np.diag([4, 6]))
        assert_allclose(pair.P, np.diag([3, 8]))

    def test_shape_mismatch(self):
        """Factors must be square of one size."""
        with pytest.raises(ValueError, match="square of equal size"):
            symmetrize_ops(np.eye(2), np.eye(3))

    def test_non_commuting_factors(self):
        """Non-commuting factors raise NotCommuting."""
        with pytest.raises(NotCommuting):
            symmetrize_ops(E12, E12.T)


class TestDecompose:
    """Tests for same-space decomposition."""

    def test_scalar_boundary_point(self, boundary_scalar_pair):
        """(0, -1) splits as 1 + (-1), 1 · (-1)."""
        result = decompose(boundary_scalar_pair)
        assert result.status == DecompositionStatus.OK
        assert result.T1[0, 0] == pytest.approx(1.0)
        assert result.T2[0, 0] == pytest.approx(-1.0)
        assert result.norms == pytest.approx((2.0, 2.0))

    def test_nilpotent_discriminant_has_no_root(self, zero2):
        """S^2 - 4P = -4 E12 has no square root."""
        result = decompose(OperatorPair(zero2, E12))
        assert result.status == DecompositionStatus.NO_SQRT
        assert result.T1 is None

    @pytest.mark.parametrize("branch_search", [False, True])
    def test_epsilon_pair_exceeds_norm_bound(self, epsilon_pair, branch_search: bool):
        """Every root for (S_ε, 0) gives a factor 2S_ε with norm above 2."""
        result = decompose(epsilon_pair, branch_search=branch_search)
        assert result.status == DecompositionStatus.NORM_BOUND_FAIL
        assert max(result.norms) == pytest.approx(2 * math.sqrt(2) / 1.3)

    def test_normal_pair(self, rng, make_normal_pair):
        """Normal pairs with spectrum in Γ decompose on the same space."""
        pair = make_normal_pair(rng, 3)
        result = decompose(pair)
        assert result.ok
        assert_symmetrizes(result.T1, result.T2, pair)

    def test_branch_decompositions_cover_every_swap(self, rng, make_normal_pair):
        """Each of the 2^3 branch choices is a valid factorization."""
        pair = make_normal_pair(rng, 3)
        found = branch_decompositions(pair)
        assert len(found) == 8
        for T1, T2 in found:
            assert_symmetrizes(T1, T2, pair)

    def test_branch_decompositions_without_root(self, zero2):
        """No square root means no branches."""
        assert branch_decompositions(OperatorPair(zero2, E12)) == []

    def test_principal_branch_carries_no_note(self, rng, make_normal_pair):
        """Without branch search the result has no cap note."""
        result = decompose(make_normal_pair(rng, 3))
        assert result.ok
        assert result.note is None

    def test_cluster_cap_falls_back_to_principal_branch(self):
        """Thirteen distinct nonzero eigenvalues exceed the cap of twelve."""
        z = 0.05 * np.arange(1, 14)
        pair = OperatorPair(np.diag(z), np.zeros((13, 13)))
        result = decompose(pair, branch_search=True)
        assert result.ok
        assert result.branches_tried == 1
        assert result.note == "principal branch only"

    def test_cluster_count_at_cap_searches_every_branch(self):
        """Twelve clusters give 2^12 sign vectors and no note."""
        z = 0.05 * np.arange(1, 13)
        pair = OperatorPair(np.diag(z), np.zeros((12, 12)))
        result = decompose(pair, branch_search=True)
        assert result.ok
        assert result.note is None

    @pytest.mark.slow
    def test_symmetrize_then_decompose_recovers_factors(self, rng):
        """decompose(symmetrize_ops(T1, T2)) finds (T1, T2) up to order."""
        for _ in range(20):
            T1 = random_contraction(rng, 3, 0.9)
            T2 = 0.5 * T1 + 0.5 * T1 @ T1
            pair = symmetrize_ops(T1, T2)
            result = decompose(pair, branch_search=True)
            assert result.ok
            assert_symmetrizes(result.T1, result.T2, pair, atol=1e-8)
            found = branch_decompositions(pair)
            assert any(
                max(op_norm(A - T1), op_norm(B - T2)) <= 1e-6
                or max(op_norm(A - T2), op_norm(B - T1)) <= 1e-6
                for A, B in found
            )


class TestEmbedAndSplit:
    """Tests for the doubling construction on H ⊕ H."""

    def test_epsilon_pair(self, epsilon_pair):
        """(S_ε, 0) splits on the doubled space although it fails on H."""
        result = embed_and_split(epsilon_pair)
        assert max(result.norms) <= 2 + 1e-10
        assert max(result.residuals.values()) <= 1e-10
        assert result.recertified
        assert result.T1.shape == (4, 4)

    def test_random_gamma_pairs(self, rng, make_gamma_pair):
        """Symmetrizations of commuting contractions split with norms <= 2."""
        for _ in range(3):
            pair = make_gamma_pair(rng, 3)
            result = embed_and_split(pair)
            assert max(result.norms) <= 2 + 1e-10
            assert max(result.residuals.values()) <= 1e-10

    @pytest.mark.slow
    def test_hundred_embeddings_across_dimensions(self, rng, make_gamma_pair):
        """100 certified pairs of dimension 1 to 6 split on H ⊕ H."""
        for trial in range(100):
            pair = make_gamma_pair(rng, trial % 6 + 1)
            result = embed_and_split(pair)
            assert max(result.norms) <= 2 + 1e-8
            assert max(result.residuals.values()) <= 1e-8
            assert result.recertified

    def test_restrictions_recover_pair(self, r_pair):
        """The top-left blocks of sum and product are S and P."""
        result = embed_and_split(r_pair)
        assert_allclose((result.T1 + result.T2)[:2, :2], r_pair.S, atol=1e-12)
        assert_allclose((result.T1 @ result.T2)[:2, :2], r_pair.P, atol=1e-12)

    def test_requires_certified_pair(self):
        """Pairs outside Γ are refused."""
        pair = OperatorPair(2.5 * np.eye(2), np.zeros((2, 2)))
        with pytest.raises(NotGammaContraction, match="not a certified"):
            embed_and_split(pair)


class TestHalfBidisc:
    """Tests for the symmetrized half-bidisc."""

    def test_scaling_round_trip(self, epsilon_pair):
        """TO_HALF followed by FROM_HALF is the identity."""
        half = half_scale(epsilon_pair, ScaleDirection.TO_HALF)
        assert_allclose(half.S, epsilon_pair.S / 2)
        back = half_scale(half, "FROM_HALF")
        assert_allclose(back.S, epsilon_pair.S)
        assert_allclose(back.P, epsilon_pair.P)

    def test_half_embedding_gives_contractions(self, epsilon_pair):
        """A, B are commuting contractions with A + B = Ŝ ⊕ Ŝ, AB = P̂ ⊕ P̂."""
        half = half_scale(epsilon_pair, ScaleDirection.TO_HALF)
        result = half_embedding(half)
        assert max(result.norms) <= 1 + 1e-10
        assert max(result.residuals.values()) <= 1e-10

    def test_half_embedding_refuses_outside_pair(self):
        """(Ŝ, P̂) whose rescaling leaves Γ is refused."""
        with pytest.raises(NotGammaContraction):
            half_embedding(OperatorPair([[1.5]], [[0.0]]))

    def test_scaling_preserves_certificate(self, rng, make_gamma_pair):
        """(S, P) and FROM_HALF(TO_HALF(S, P)) get the same verdict."""
        pairs = [make_gamma_pair(rng, 3), OperatorPair(2.5 * np.eye(2), np.eye(2))]
        for pair in pairs:
            back = half_scale(half_scale(pair, ScaleDirection.TO_HALF), "FROM_HALF")
            assert (
                is_gamma_contraction(back).overall
                == is_gamma_contraction(pair).overall
            )

    def test_half_embedding_halves_the_doubling(self, rng, make_gamma_pair):
        """The half-bidisc factors are the doubling factors of (S, P) over 2."""
        pair = make_gamma_pair(rng, 3)
        half = half_embedding(half_scale(pair, ScaleDirection.TO_HALF))
        full = embed_and_split(pair)
        assert_allclose(half.T1, full.T1 / 2, atol=1e-12)
        assert_allclose(half.T2, full.T2 / 2, atol=1e-12)
        assert max(half.norms) <= 1 + 1e-8

    def test_half_embedding_refuses_scaled_outside_pair(self):
        """A pair outside Γ stays outside after TO_HALF."""
        pair = OperatorPair(2.5 * np.eye(2), np.eye(2))
        with pytest.raises(NotGammaContraction):
            half_embedding(half_scale(pair, ScaleDirection.TO_HALF))


class TestFactorizationSearch:
    """Tests for the Newton search over all factorizations."""

    def test_scalar_pair_has_two_factorizations(self, boundary_scalar_pair):
        """t^2 = 1 has the two roots ±1."""
        found = factorization_search(boundary_scalar_pair, trials=20)
        roots = sorted(T1[0, 0].real for T1, _ in found)
        assert roots == pytest.approx([-1.0, 1.0], abs=1e-10)

    def test_search_is_seeded(self, boundary_scalar_pair):
        """The same seed gives the same solutions in the same order."""
        first = factorization_search(boundary_scalar_pair, trials=10, seed=4)
        second = factorization_search(boundary_scalar_pair, trials=10, seed=4)
        assert len(first) == len(second)
        for (a, _), (b, _) in zip(first, second):
            assert_allclose(a, b)

    def test_dimension_cap(self):
        """Dimensions above the cap are refused."""
        pair = OperatorPair(np.zeros((9, 9)), np.zeros((9, 9)))
        with pytest.raises(ValueError, match="dimension <= 8"):
            factorization_search(pair)
