"""
Both directions of the symmetrization problem.

``symmetrize_ops`` composes (T1, T2) into (T1 + T2, T1 T2). ``decompose``
tries to invert it on the same space through a square root of S^2 - 4P;
``embed_and_split`` always succeeds for a Γ-contraction by doubling the space.
"""

import itertools
import logging
from typing import List, Sequence, Tuple

import numpy as np

from .analysis import is_gamma_contraction
from .linalg import (
    NoPrimarySqrt,
    commutator,
    eigenvalue_clusters,
    op_norm,
    primary_sqrt,
)
from .models import (
    ComplexMatrix,
    DecompositionResult,
    DecompositionStatus,
    EmbeddingResult,
    NotCommuting,
    OperatorPair,
    ScaleDirection,
    Tolerances,
    Verdict,
    as_matrix,
)

logger = logging.getLogger(__name__)

MAX_SEARCH_CLUSTERS = 12

# Newton search settings.
NEWTON_ITERATIONS = 40
NEWTON_DAMPING = 0.5
NEWTON_MIN_STEP = 1e-14
ACCEPT_RESIDUAL = 1e-14
DEDUP_DISTANCE = 1e-6
SEARCH_MAX_DIM = 8


class NotGammaContraction(ValueError):
    """Raised when an operation needs a certified Γ-contraction."""

    pass


class NormBoundViolated(ArithmeticError):
    """A constructed factor exceeds the norm bound the construction guarantees."""

    pass


def symmetrize_ops(
    T1: ComplexMatrix, T2: ComplexMatrix, tol: Tolerances = Tolerances()
) -> OperatorPair:
    """(T1, T2) -> (T1 + T2, T1 T2) for a commuting pair."""
    T1 = as_matrix(T1, "T1")
    T2 = as_matrix(T2, "T2")
    if T1.shape != T2.shape or T1.shape[0] != T1.shape[1]:
        raise ValueError(
            f"T1 and T2 must be square of equal size, got {T1.shape} and {T2.shape}"
        )
    defect = op_norm(commutator(T1, T2))
    bound = tol.comm_tol * (1 + op_norm(T1) * op_norm(T2))
    if defect > bound:
        raise NotCommuting(f"||T1 T2 - T2 T1|| = {defect:.3e} exceeds {bound:.3e}")
    return OperatorPair(T1 + T2, T1 @ T2, tol)


def _sign_vectors(reps: Sequence[complex], tol: Tolerances) -> Tuple[list, bool]:
    """Every branch choice over the nonzero clusters (zero has one root)."""
    free = [i for i, rep in enumerate(reps) if abs(rep) > tol.rank_cutoff]
    if len(free) > MAX_SEARCH_CLUSTERS:
        return [None], False
    vectors = []
    for choice in itertools.product((1, -1), repeat=len(free)):
        signs = [1] * len(reps)
        for index, sign in zip(free, choice):
            signs[index] = sign
        vectors.append(signs)
    return vectors, True


def _candidate(
    pair: OperatorPair, signs: Sequence[int] | None
) -> Tuple[ComplexMatrix, float, Tuple[float, float]]:
    S, P, tol = pair.S, pair.P, pair.tol
    delta = primary_sqrt(S @ S - 4 * P, signs, tol)
    comm = max(op_norm(commutator(delta, S)), op_norm(commutator(delta, P)))
    scale = 1 + op_norm(delta) * (op_norm(S) + op_norm(P))
    return delta, comm / scale, (op_norm(S + delta), op_norm(S - delta))


def _branches(pair: OperatorPair, branch_search: bool):
    if not branch_search:
        return [None], None
    reps = eigenvalue_clusters(pair.S @ pair.S - 4 * pair.P, pair.tol)
    vectors, complete = _sign_vectors(reps, pair.tol)
    if not complete:
        logger.info(
            "%d distinct eigenvalues exceed the branch-search cap; "
            "trying the principal branch only",
            len(reps),
        )
        return vectors, "principal branch only"
    logger.debug("Searching %d square-root branches", len(vectors))
    return vectors, None


def decompose(pair: OperatorPair, branch_search: bool = False) -> DecompositionResult:
    """Split (S, P) as (T1 + T2, T1 T2) with T1, T2 = (S ± Δ)/2, Δ^2 = S^2 - 4P."""
    tol = pair.tol
    vectors, note = _branches(pair, branch_search)
    best_norms = None
    best_delta = None
    commutant_failures = 0

    for tried, signs in enumerate(vectors, start=1):
        try:
            delta, comm, norms = _candidate(pair, signs)
        except NoPrimarySqrt as e:
            logger.debug("No primary square root: %s", e)
            return DecompositionResult(
                DecompositionStatus.NO_SQRT, branches_tried=tried, note=str(e)
            )
        if comm > tol.comm_tol:
            commutant_failures += 1
            continue
        if best_norms is None or max(norms) < max(best_norms):
            best_norms, best_delta = norms, delta
        if max(norms) <= 2 + tol.assert_tol:
            T1 = (pair.S + delta) / 2
            T2 = (pair.S - delta) / 2
            return DecompositionResult(
                DecompositionStatus.OK,
                T1=T1,
                T2=T2,
                delta=delta,
                norms=norms,
                branches_tried=tried,
                note=note,
            )

    if best_norms is None:
        return DecompositionResult(
            DecompositionStatus.COMMUTANT_FAIL,
            branches_tried=len(vectors),
            note=f"{commutant_failures} branch(es) failed to commute with S and P",
        )
    return DecompositionResult(
        DecompositionStatus.NORM_BOUND_FAIL,
        delta=best_delta,
        norms=best_norms,
        branches_tried=len(vectors),
        note=note,
    )


def branch_decompositions(
    pair: OperatorPair,
) -> List[Tuple[ComplexMatrix, ComplexMatrix]]:
    """Every square-root branch that passes the commutant and norm checks."""
    vectors, _ = _branches(pair, branch_search=True)
    found = []
    for signs in vectors:
        try:
            delta, comm, norms = _candidate(pair, signs)
        except NoPrimarySqrt:
            return []
        if comm <= pair.tol.comm_tol and max(norms) <= 2 + pair.tol.assert_tol:
            found.append(((pair.S + delta) / 2, (pair.S - delta) / 2))
    return found


def _split_blocks(S: ComplexMatrix, P: ComplexMatrix):
    n = S.shape[0]
    I = np.eye(n, dtype=complex)
    Z = (S @ S - 4 * P) / 4
    A = np.block([[S / 2, Z], [I, S / 2]])
    B = np.block([[S / 2, -Z], [-I, S / 2]])
    return A, B


def _embedding_residuals(
    T1: ComplexMatrix, T2: ComplexMatrix, S: ComplexMatrix, P: ComplexMatrix
) -> dict:
    n = S.shape[0]
    S2 = np.kron(np.eye(2), S)
    P2 = np.kron(np.eye(2), P)
    return {
        "sum": op_norm(T1 + T2 - S2),
        "product": op_norm(T1 @ T2 - P2),
        "product_swapped": op_norm(T2 @ T1 - P2),
        "restriction_S": op_norm((T1 + T2)[:n, :n] - S),
        "restriction_P": op_norm((T1 @ T2)[:n, :n] - P),
    }


def _require_certified(pair: OperatorPair, label: str) -> None:
    report = is_gamma_contraction(pair)
    if report.overall != Verdict.CERTIFIED_CONTRACTION:
        detail = f" (violates {report.violation})" if report.violation else ""
        raise NotGammaContraction(
            f"{label} is {report.overall.value}{detail}, not a certified Γ-contraction"
        )


def embed_and_split(pair: OperatorPair) -> EmbeddingResult:
    """Commuting T1, T2 on H ⊕ H with sum S ⊕ S, product P ⊕ P and norms <= 2."""
    _require_certified(pair, "(S, P)")
    tol = pair.tol.assert_tol
    T1, T2 = _split_blocks(pair.S, pair.P)
    norms = (op_norm(T1), op_norm(T2))
    if max(norms) > 2 + tol:
        raise NormBoundViolated(
            f"Block factors have norms {norms[0]:.10f}, {norms[1]:.10f} above 2"
        )
    residuals = _embedding_residuals(T1, T2, pair.S, pair.P)
    recertified = (
        is_gamma_contraction(OperatorPair(T1 + T2, T1 @ T2, pair.tol)).overall
        == Verdict.CERTIFIED_CONTRACTION
    )
    return EmbeddingResult(
        T1=T1,
        T2=T2,
        block_layout="H ⊕ H; T1 = [[S/2, (S²−4P)/4], [I, S/2]], "
        "T2 = [[S/2, −(S²−4P)/4], [−I, S/2]]",
        residuals=residuals,
        norms=norms,
        recertified=recertified,
    )


def half_scale(pair: OperatorPair, direction: ScaleDirection) -> OperatorPair:
    """(S, P) -> (S/2, P/4) or back to (2S, 4P)."""
    if ScaleDirection(direction) == ScaleDirection.TO_HALF:
        return OperatorPair(pair.S / 2, pair.P / 4, pair.tol)
    return OperatorPair(2 * pair.S, 4 * pair.P, pair.tol)


def half_embedding(pair: OperatorPair) -> EmbeddingResult:
    """Commuting contractions A, B on H ⊕ H with A + B = Ŝ ⊕ Ŝ, AB = P̂ ⊕ P̂."""
    full = half_scale(pair, ScaleDirection.FROM_HALF)
    _require_certified(full, "(2Ŝ, 4P̂)")
    A_tilde, B_tilde = _split_blocks(full.S, full.P)
    A, B = A_tilde / 2, B_tilde / 2
    norms = (op_norm(A), op_norm(B))
    if max(norms) > 1 + pair.tol.assert_tol:
        raise NormBoundViolated(
            f"Half-bidisc factors have norms {norms[0]:.10f}, {norms[1]:.10f} above 1"
        )
    return EmbeddingResult(
        T1=A,
        T2=B,
        block_layout="H ⊕ H; A = Ã/2, B = B̃/2 built from (2Ŝ, 4P̂)",
        residuals=_embedding_residuals(A, B, pair.S, pair.P),
        norms=norms,
    )


def _residual(T1: ComplexMatrix, S: ComplexMatrix, P: ComplexMatrix) -> np.ndarray:
    return np.concatenate(
        [(T1 @ T1 - T1 @ S + P).ravel(order="F"), (T1 @ S - S @ T1).ravel(order="F")]
    )


def _jacobian(T1: ComplexMatrix, S: ComplexMatrix) -> ComplexMatrix:
    n = S.shape[0]
    I = np.eye(n)
    quadratic = np.kron(I, T1) + np.kron(T1.T, I) - np.kron(S.T, I)
    bracket = np.kron(S.T, I) - np.kron(I, S)
    return np.vstack([quadratic, bracket])


def _newton(
    T1: ComplexMatrix, S: ComplexMatrix, P: ComplexMatrix, iterations: int
) -> Tuple[ComplexMatrix, float]:
    n = S.shape[0]
    r = _residual(T1, S, P)
    norm_r = float(np.linalg.norm(r))
    for _ in range(iterations):
        step, *_ = np.linalg.lstsq(_jacobian(T1, S), -r, rcond=None)
        step = step.reshape(n, n, order="F")
        t = 1.0
        while True:
            candidate = T1 + t * step
            r_new = _residual(candidate, S, P)
            if np.linalg.norm(r_new) <= norm_r:
                break
            t *= NEWTON_DAMPING
            if t < 1e-8:
                return T1, norm_r
        T1, r = candidate, r_new
        norm_r = float(np.linalg.norm(r))
        if t * np.linalg.norm(step) < NEWTON_MIN_STEP * (1 + np.linalg.norm(T1)):
            break
    return T1, norm_r


def factorization_search(
    pair: OperatorPair,
    trials: int = 500,
    seed: int = 0,
    iterations: int = NEWTON_ITERATIONS,
) -> List[Tuple[ComplexMatrix, ComplexMatrix]]:
    """Random-restart Newton search for all (T1, S - T1) symmetrizing to (S, P)."""
    if pair.dim > SEARCH_MAX_DIM:
        raise ValueError(
            f"factorization_search supports dimension <= {SEARCH_MAX_DIM}, "
            f"got {pair.dim}"
        )
    S, P, tol = pair.S, pair.P, pair.tol
    n = pair.dim
    radius = 1 + op_norm(S)
    accept = ACCEPT_RESIDUAL * (1 + op_norm(S)) ** 2
    solutions: List[ComplexMatrix] = []

    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        mod = radius * np.sqrt(rng.random((n, n)))
        T1 = mod * np.exp(2j * np.pi * rng.random((n, n)))
        T1, residual = _newton(T1, S, P, iterations)
        if residual > accept:
            continue
        if any(np.linalg.norm(T1 - known) <= DEDUP_DISTANCE for known in solutions):
            continue
        T2 = S - T1
        check = max(op_norm(T1 @ T2 - P), op_norm(T2 @ T1 - P))
        if check > tol.assert_tol * (1 + op_norm(S)) ** 2:
            continue
        logger.debug("Trial %d found a new factorization", trial)
        solutions.append(T1)

    return [(T1, S - T1) for T1 in solutions]
