"""
Executable reproductions of the worked examples and counterexamples.

Each ``repro_*`` function rebuilds one construction, recomputes its numbers
and records pass/fail per claim in a ``ReproReport``. Everything is
deterministic given ``ExampleParams``.
"""

import logging
import math
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

from .analysis import (
    PreconditionFailed,
    fundamental_operator,
    is_gamma_contraction,
    is_normal,
    strict_criterion_value,
)
from .dilation import lift_commutation_check
from .linalg import adjoint, commutator, numerical_radius, op_norm
from .models import (
    ComplexMatrix,
    DecompositionStatus,
    ExampleParams,
    OperatorPair,
    ReproReport,
    Verdict,
)
from .symmetrization import (
    decompose,
    embed_and_split,
    factorization_search,
    symmetrize_ops,
)

logger = logging.getLogger(__name__)


class UnknownExample(ValueError):
    pass


E12 = np.array([[0, 1], [0, 0]], dtype=complex)
ZERO2 = np.zeros((2, 2), dtype=complex)


def _same_unordered(
    found: List[Tuple[ComplexMatrix, ComplexMatrix]],
    expected: Tuple[ComplexMatrix, ComplexMatrix],
    tol: float = 1e-6,
) -> bool:
    """True iff ``found`` is exactly {(X, Y), (Y, X)} for the expected pair."""
    X, Y = expected
    targets = [(X, Y), (Y, X)]
    if len(found) != 2:
        return False
    matched = set()
    for T1, T2 in found:
        for i, (A, B) in enumerate(targets):
            if np.linalg.norm(T1 - A) <= tol and np.linalg.norm(T2 - B) <= tol:
                matched.add(i)
    return matched == {0, 1}


def epsilon_matrix(epsilon: float) -> ComplexMatrix:
    """[[ε, ε], [0, 0]]: numerical radius below 1 while the norm exceeds 1."""
    return epsilon * np.array([[1, 1], [0, 0]], dtype=complex)


def r_matrix(r: float) -> ComplexMatrix:
    """[[r²/2, 2 - r], [0, r²/2]]: norm within r of 2, numerical radius below 1."""
    a = r * r / 2
    return np.array([[a, 2 - r], [0, a]], dtype=complex)


def repro_small_radius_large_norm(
    epsilon: float = 1 / 1.3, trials: int = 500, seed: int = 0
) -> ReproReport:
    """(S_ε, 0): a Γ-contraction that is not the symmetrization of contractions."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    report = ReproReport(
        "ex3_3", params={"epsilon": epsilon, "trials": trials, "seed": seed}
    )
    S = epsilon_matrix(epsilon)
    pair = OperatorPair(S, ZERO2)

    omega = numerical_radius(S)
    norm = op_norm(S)
    expected_omega = epsilon * (math.sqrt(2) + 1) / 2
    gamma = is_gamma_contraction(pair)
    decomposition = decompose(pair, branch_search=True)
    solutions = factorization_search(pair, trials=trials, seed=seed)

    report.values.update(
        omega=omega,
        expected_omega=expected_omega,
        norm=norm,
        decomposition_norms=decomposition.norms,
        solutions_found=len(solutions),
    )
    report.verdicts.update(
        gamma_contraction=gamma.overall,
        decomposition=decomposition.status,
    )
    report.check("omega matches ε(√2+1)/2", abs(omega - expected_omega) <= 1e-8)
    report.check("norm equals √2·ε", abs(norm - math.sqrt(2) * epsilon) <= 1e-10)
    report.check(
        "search finds only {S_ε, 0}", _same_unordered(solutions, (S, ZERO2))
    )

    if expected_omega <= 1:
        F = fundamental_operator(pair)
        strict = strict_criterion_value(pair)
        report.values.update(omega_F=F.omega, strict_criterion=strict)
        report.check(
            "Γ-contraction certified", gamma.overall == Verdict.CERTIFIED_CONTRACTION
        )
        report.check(
            "strict and fundamental criteria agree",
            (strict <= 1 + 1e-8) == (F.omega <= 1 + 1e-8),
        )
        report.check("fundamental operator is S_ε", op_norm(F.full() - S) <= 1e-12)
    else:
        report.check("not a Γ-contraction", gamma.overall == Verdict.CERTIFIED_NOT)

    if 2 * norm > 2 + 1e-8:
        report.check(
            "decomposition fails the norm bound",
            decomposition.status == DecompositionStatus.NORM_BOUND_FAIL,
        )
    else:
        T1, T2 = decomposition.T1, decomposition.T2
        ok = decomposition.ok and _same_unordered([(T1, T2), (T2, T1)], (S, ZERO2))
        report.check("decomposition returns {S_ε, 0}", ok)
    return report


def delta_chase(delta: float) -> Tuple[float, float]:
    """Find r in (0, 1/100) with 2 - δ < ||S_r|| <= 2; returns (r, ||S_r||)."""
    if not 0 < delta < 2:
        raise ValueError(f"delta must lie in (0, 2), got {delta}")
    r = min(delta / 2, 0.005)
    norm = op_norm(r_matrix(r))
    while norm <= 2 - delta:
        r /= 2
        norm = op_norm(r_matrix(r))
    logger.debug("δ-chase: r = %.3e gives ||S_r|| = %.12f", r, norm)
    return r, norm


def repro_norm_near_two(
    r: float = 0.005, delta: float = 0.01, trials: int = 500, seed: int = 0
) -> ReproReport:
    """(S_r, 0): unique factors whose norm approaches 2."""
    if not 0 < r < 0.01:
        raise ValueError(f"r must lie in (0, 1/100), got {r}")
    report = ReproReport(
        "ex3_5", params={"r": r, "delta": delta, "trials": trials, "seed": seed}
    )
    S = r_matrix(r)
    pair = OperatorPair(S, ZERO2)

    omega = numerical_radius(S)
    bound = (2 + r * r - r) / 2
    norm = op_norm(S)
    gamma = is_gamma_contraction(pair)
    solutions = factorization_search(pair, trials=trials, seed=seed)
    embedding = embed_and_split(pair)
    r_hat, chased_norm = delta_chase(delta)

    report.values.update(
        omega=omega,
        omega_bound=bound,
        norm=norm,
        solutions_found=len(solutions),
        embedding_norms=embedding.norms,
        r_hat=r_hat,
        chased_norm=chased_norm,
    )
    report.verdicts["gamma_contraction"] = gamma.overall
    report.check("omega below (2+r²-r)/2", omega <= bound + 1e-8)
    report.check(
        "Γ-contraction certified", gamma.overall == Verdict.CERTIFIED_CONTRACTION
    )
    report.check("norm in (2-r, 2]", 2 - r - 1e-10 < norm <= 2)
    report.check("search finds only {S_r, 0}", _same_unordered(solutions, (S, ZERO2)))
    report.check("embedding factors within norm 2", max(embedding.norms) <= 2 + 1e-8)
    report.check("δ-chase lands in (2-δ, 2]", 2 - delta < chased_norm <= 2)
    return report


def repro_nilpotent(z: complex = 5.0) -> ReproReport:
    """Non-contractive nilpotent factors whose symmetrization is (0, 0)."""
    z = complex(z)
    report = ReproReport("nilpotent", params={"z": z})
    T1 = z * E12
    T2 = -z * E12
    pair = symmetrize_ops(T1, T2)
    gamma = is_gamma_contraction(pair)
    report.values.update(
        norm_T1=op_norm(T1), norm_S=op_norm(pair.S), norm_P=op_norm(pair.P)
    )
    report.verdicts["gamma_contraction"] = gamma.overall
    report.check(
        "symmetrization is (0, 0)",
        bool(np.all(pair.S == 0) and np.all(pair.P == 0)),
    )
    report.check(
        "(0, 0) is a certified Γ-contraction",
        gamma.overall == Verdict.CERTIFIED_CONTRACTION,
    )
    if abs(z) > 1:
        report.informational.append(
            f"factors have norm {abs(z):g} > 1, so they are not contractions"
        )
    return report


def _block(tl, tr, bl, br) -> ComplexMatrix:
    return np.block([[tl, tr], [bl, br]])


def _d_inverse(W: ComplexMatrix) -> ComplexMatrix:
    w, V = np.linalg.eigh(np.eye(W.shape[0]) - adjoint(W) @ W)
    return (V / np.sqrt(w)) @ adjoint(V)


def _counterexample_1_blocks(params: Dict[str, Any]):
    q, w, y = (complex(params[key]) for key in ("q", "w", "y"))
    Q, W, Y = q * E12, w * E12, y * E12
    return Q, W, Y, np.asarray(params["R"], dtype=complex)


def _counterexample_1_conditions(Q, W, Y, R) -> Dict[str, bool]:
    tol = 1e-12
    if op_norm(W) >= 1:
        return {"(iii) norms": False}
    D_inv = _d_inverse(W)
    S = _block(Q, ZERO2, ZERO2, ZERO2)
    S1 = _block(R, ZERO2, Y, R)
    P = _block(W, ZERO2, ZERO2, ZERO2)
    return {
        "(i) QW = WQ, RW = WR, YW = YQ = 0": (
            op_norm(commutator(Q, W)) <= tol
            and op_norm(commutator(R, W)) <= tol
            and op_norm(Y @ W) <= tol
            and op_norm(Y @ Q) <= tol
            and op_norm(commutator(Q, R)) <= tol
        ),
        "(ii) Y*W ≠ 0": op_norm(adjoint(Y) @ W) > tol,
        "(iii) norms": op_norm(S) < 2 and op_norm(S1) < 2 and op_norm(P) < 1,
        "(iv) transformed norms < 1": (
            op_norm(D_inv @ (Q - adjoint(Q) @ W) @ D_inv) < 1
            and op_norm(D_inv @ (R - adjoint(R) @ W) @ D_inv) < 1
            and op_norm((Y - adjoint(Y) @ W) @ D_inv) < 1
        ),
    }


def repro_noncommuting_fundamental(params: ExampleParams | None = None) -> ReproReport:
    """Two Γ-contractions sharing P, with commuting S, S1 but [F, F1] ≠ 0."""
    params = params or ExampleParams()
    values = params.counterexample_1
    report = ReproReport("counter_F_commute", params=dict(values))
    Q, W, Y, R = _counterexample_1_blocks(values)

    conditions = _counterexample_1_conditions(Q, W, Y, R)
    failed = [name for name, ok in conditions.items() if not ok]
    if failed:
        raise PreconditionFailed(f"Hypotheses violated: {', '.join(failed)}")

    S = _block(Q, ZERO2, ZERO2, ZERO2)
    S1 = _block(R, ZERO2, Y, R)
    P = _block(W, ZERO2, ZERO2, ZERO2)
    comms = {
        "SP": op_norm(commutator(S, P)),
        "S1P": op_norm(commutator(S1, P)),
        "SS1": op_norm(commutator(S, S1)),
    }
    pair, other = OperatorPair(S, P), OperatorPair(S1, P)
    first, second = is_gamma_contraction(pair), is_gamma_contraction(other)
    lift = lift_commutation_check(pair, other)

    report.values.update(commutators=comms, lift=lift)
    report.verdicts.update(
        conditions=conditions, first=first.overall, second=second.overall
    )
    report.check("S, S1, P commute pairwise", max(comms.values()) <= 1e-10)
    report.check(
        "both pairs certified",
        first.is_certified and second.is_certified,
    )
    report.check("‖[F, F1]‖ > 0.01", lift["F_commutator"] > 0.01)
    if _is_scalar(R):
        report.informational.append(
            f"scalar R: F and F1 may commute (‖[F, F1]‖ = {lift['F_commutator']:.3e})"
        )
    return report


def _is_scalar(R: ComplexMatrix) -> bool:
    return op_norm(R - R[0, 0] * np.eye(R.shape[0])) <= 1e-12


def _doubly_commute(X: ComplexMatrix, Y: ComplexMatrix, tol: float) -> bool:
    return (
        op_norm(commutator(X, Y)) <= tol
        and op_norm(commutator(X, adjoint(Y))) <= tol
    )


def repro_nonnormal_fundamental(params: ExampleParams | None = None) -> ReproReport:
    """Two Γ-contractions sharing P: F normal, F1 not, although S S1 = S1 S."""
    params = params or ExampleParams()
    blocks = params.counterexample_2
    A, B, T = blocks["A"], blocks["B"], blocks["T"]
    report = ReproReport("counter_F_normal", params=dict(blocks))
    tol = 1e-12

    hypotheses = {
        "A normal": is_normal(A, tol),
        "A, B doubly commute": _doubly_commute(A, B, tol),
        "A, T doubly commute": _doubly_commute(A, T, tol),
        "B, T doubly commute": _doubly_commute(B, T, tol),
        "‖A‖, ‖B‖, ‖T‖ < 1": max(op_norm(A), op_norm(B), op_norm(T)) < 1,
    }
    failed = [name for name, ok in hypotheses.items() if not ok]
    if failed:
        raise PreconditionFailed(f"Hypotheses violated: {', '.join(failed)}")

    n = A.shape[0]
    I, Z = np.eye(n, dtype=complex), np.zeros((n, n), dtype=complex)
    S = _block(A, adjoint(A), adjoint(A) @ T, A)
    S1 = _block(B, adjoint(B), adjoint(B) @ T, B)
    P = _block(Z, I, T, Z)
    if max(op_norm(S), op_norm(S1)) >= 2:
        raise PreconditionFailed("Hypotheses violated: ‖S‖, ‖S1‖ < 2")

    comms = {
        "SP": op_norm(commutator(S, P)),
        "S1P": op_norm(commutator(S1, P)),
        "SS1": op_norm(commutator(S, S1)),
    }
    pair, other = OperatorPair(S, P), OperatorPair(S1, P)
    first, second = is_gamma_contraction(pair), is_gamma_contraction(other)
    F, F1 = fundamental_operator(pair).F, fundamental_operator(other).F
    normal_gap = op_norm(adjoint(F) @ F - F @ adjoint(F))
    nonnormal_gap = op_norm(adjoint(F1) @ F1 - F1 @ adjoint(F1))

    report.values.update(
        commutators=comms,
        F_self_commutator=normal_gap,
        F1_self_commutator=nonnormal_gap,
        lift=lift_commutation_check(pair, other),
    )
    report.verdicts.update(
        hypotheses=hypotheses, first=first.overall, second=second.overall
    )
    report.check("S, S1, P commute pairwise", max(comms.values()) <= 1e-10)
    report.check("both pairs certified", first.is_certified and second.is_certified)
    report.check("F is normal", normal_gap <= 1e-8)
    if is_normal(B, tol):
        report.informational.append(
            f"B is normal: F1 self-commutator {nonnormal_gap:.3e} is expected to vanish"
        )
    else:
        report.check("F1 is not normal", nonnormal_gap > 0.01)
    return report


EXAMPLES: Dict[str, Callable[[ExampleParams], ReproReport]] = {
    "ex3_3": lambda p: repro_small_radius_large_norm(
        p.epsilon, p.search_trials, p.seed
    ),
    "ex3_5": lambda p: repro_norm_near_two(p.r, p.delta, p.search_trials, p.seed),
    "nilpotent": lambda p: repro_nilpotent(p.z),
    "counter_F_commute": repro_noncommuting_fundamental,
    "counter_F_normal": repro_nonnormal_fundamental,
}


def run_example(name: str, params: ExampleParams | None = None) -> List[ReproReport]:
    """Run one named example, or every example for ``all``."""
    params = params or ExampleParams()
    if name == "all":
        return run_all(params)
    if name not in EXAMPLES:
        raise UnknownExample(
            f"Unknown example '{name}'. Valid: {', '.join([*EXAMPLES, 'all'])}"
        )
    return [EXAMPLES[name](params)]


def run_all(params: ExampleParams | None = None) -> List[ReproReport]:
    params = params or ExampleParams()
    reports = []
    for name, runner in EXAMPLES.items():
        logger.info("Reproducing %s", name)
        reports.append(runner(params))
    return reports
