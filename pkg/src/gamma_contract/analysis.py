"""
Certification and classification of commuting matrix pairs (S, P).

The authoritative Γ-contraction test is the norm/fundamental-operator
criterion: ||S|| <= 2, ||P|| <= 1 and S - S*P = D_P F D_P solvable with
ω(F) <= 1. The ρ-scan and the polynomial sampler only ever add evidence.
"""

import logging
from typing import Dict, Tuple

import numpy as np

from .geometry import BAND, root_moduli
from .linalg import (
    adjoint,
    commutator,
    hermitian_eig,
    joint_spectrum,
    numerical_radius,
    op_norm,
    operator_modulus,
    spectral_radius,
)
from .models import (
    ComplexMatrix,
    FundamentalOp,
    GammaReport,
    OperatorPair,
    PointPair,
    Tolerances,
    UnitaryMethod,
    Verdict,
)

logger = logging.getLogger(__name__)

# Vectorised cross-check solve is O(n^6); only run it on small pairs.
LSTSQ_MAX_DIM = 16

# Agreement required between the two solves, relative to 1 + ||F||.
CROSS_CHECK_TOL = 1e-7

RHO_RADIUS_RANGE = (0.05, 0.999)

# Eigenvalues of I - P*P this close to zero are rounding noise, not defect.
DEFECT_NOISE = 64 * np.finfo(float).eps

__all__ = [
    "PairAnalysisError",
    "NotSolvable",
    "SolvesDisagree",
    "NotContraction",
    "StrictPreconditionFailed",
    "PreconditionFailed",
    "commutator",
    "defect_decomposition",
    "rho",
    "rho_scan",
    "fundamental_operator",
    "is_gamma_contraction",
    "strict_criterion_value",
    "is_gamma_contraction_strict",
    "is_gamma_unitary",
    "is_gamma_isometry",
    "is_normal",
    "is_hyponormal",
    "hyponormal_transfer_check",
    "normality_transfer",
    "von_neumann_check",
]


class PairAnalysisError(Exception):
    """Base class for pair-analysis failures."""

    pass


class NotSolvable(PairAnalysisError):
    """S - S*P has mass outside the range of D_P (.) D_P."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class SolvesDisagree(NotSolvable):
    """The eigenbasis and least-squares solutions differ beyond CROSS_CHECK_TOL."""


class NotContraction(PairAnalysisError):
    pass


class StrictPreconditionFailed(PairAnalysisError):
    pass


class PreconditionFailed(PairAnalysisError):
    pass


def _eye(n: int) -> ComplexMatrix:
    return np.eye(n, dtype=complex)


def defect_decomposition(
    P: ComplexMatrix, tol: Tolerances
) -> Tuple[np.ndarray, ComplexMatrix, ComplexMatrix]:
    """Return (d, V, D_P): defect eigenvalues above rank_cutoff, their
    orthonormal eigenvectors, and D_P = (I - P*P)^(1/2) itself."""
    n = P.shape[0]
    w, V = hermitian_eig(_eye(n) - adjoint(P) @ P, tol)
    w = np.where(w <= DEFECT_NOISE * n * (1 + op_norm(P) ** 2), 0.0, w)
    d = np.sqrt(w)
    D_P = (V * d) @ adjoint(V)
    keep = d > tol.rank_cutoff
    return d[keep], V[:, keep], D_P


def _rho_matrix(S: ComplexMatrix, P: ComplexMatrix) -> ComplexMatrix:
    X = S - adjoint(S) @ P
    return 2 * (_eye(S.shape[0]) - adjoint(P) @ P) - X - adjoint(X)


def rho(pair: OperatorPair) -> ComplexMatrix:
    """ρ(S, P) = 2(I - P*P) - (S - S*P) - (S* - P*S)."""
    R = _rho_matrix(pair.S, pair.P)
    skew = op_norm(R - adjoint(R))
    if skew > 1e-12 * (1 + op_norm(R)):
        raise PairAnalysisError(f"ρ(S, P) is not Hermitian: ||R - R*|| = {skew:.3e}")
    return R


def rho_scan(
    pair: OperatorPair, radial_steps: int = 32, angular_steps: int = 64
) -> float:
    """Smallest eigenvalue of ρ(αS, α²P) over a polar grid of α in the disc."""
    if radial_steps < 1 or angular_steps < 1:
        raise ValueError("rho_scan needs at least one radial and one angular step")
    S, P = pair.S, pair.P
    n = pair.dim
    I = _eye(n)
    PP = adjoint(P) @ P
    SP = adjoint(S) @ P
    phases = np.exp(2j * np.pi * np.arange(angular_steps) / angular_steps)
    lowest = np.inf
    for r in np.linspace(*RHO_RADIUS_RANGE, radial_steps):
        # X(α) = αS - |α|^2 α S*P
        alpha = (r * phases)[:, None, None]
        X = alpha * (S - r**2 * SP)[None, :, :]
        R = 2 * (I - r**4 * PP)[None, :, :] - X - np.conj(np.transpose(X, (0, 2, 1)))
        lowest = min(lowest, float(np.linalg.eigvalsh(R)[:, 0].min()))
    logger.debug("rho_scan minimum eigenvalue %.3e", lowest)
    return lowest


def _lstsq_solution(B: ComplexMatrix, M: ComplexMatrix) -> ComplexMatrix:
    """Least-squares X with B X B* = M, from the vectorised equation."""
    k = B.shape[1]
    K = np.kron(B.conj(), B)
    x, *_ = np.linalg.lstsq(K, M.reshape(-1, order="F"), rcond=None)
    return x.reshape(k, k, order="F")


def fundamental_operator(pair: OperatorPair) -> FundamentalOp:
    """Solve S - S*P = D_P X D_P on the defect space and report ω(X)."""
    S, P, tol = pair.S, pair.P, pair.tol
    p_norm = op_norm(P)
    if p_norm > 1 + tol.assert_tol:
        raise NotContraction(f"||P|| = {p_norm:.6f} exceeds 1")

    d, V, D_P = defect_decomposition(P, tol)
    M = S - adjoint(S) @ P
    k = len(d)

    if k == 0:
        F = np.zeros((0, 0), dtype=complex)
        residual = op_norm(M)
        omega = 0.0
    else:
        F = (adjoint(V) @ M @ V) / np.outer(d, d)
        residual = op_norm(D_P @ V @ F @ adjoint(V) @ D_P - M)
        omega = numerical_radius(F)

    if residual > tol.assert_tol:
        raise NotSolvable(
            f"S - S*P = D_P X D_P has residual {residual:.3e} "
            f"(> {tol.assert_tol:.1e}) on the defect space",
            residual,
        )

    cross_check = None
    if 0 < k and pair.dim <= LSTSQ_MAX_DIM:
        cross_check = op_norm(F - _lstsq_solution(V * d, M))
        if cross_check > CROSS_CHECK_TOL * (1 + op_norm(F)):
            logger.warning(
                "Eigenbasis and least-squares solves disagree by %.3e", cross_check
            )
            raise SolvesDisagree(
                f"Solves of S - S*P = D_P X D_P disagree by {cross_check:.3e} "
                f"(> {CROSS_CHECK_TOL:.0e})",
                cross_check,
            )
    elif k:
        logger.debug("Skipping least-squares cross-check for dimension %d", pair.dim)

    return FundamentalOp(
        F=F,
        defect_basis=V,
        defect_values=d,
        residual=float(residual),
        omega=float(omega),
        cross_check=cross_check,
    )


def _spectrum_in_gamma(pair: OperatorPair, seed: int) -> Tuple[bool, float]:
    worst = 0.0
    for lam, mu in joint_spectrum(pair.S, pair.P, pair.tol, seed=seed):
        worst = max(worst, *root_moduli(PointPair(lam, mu)))
    return worst <= 1 + max(BAND, pair.tol.assert_tol), worst


def is_gamma_contraction(
    pair: OperatorPair,
    radial_steps: int = 32,
    angular_steps: int = 64,
    seed: int = 0,
) -> GammaReport:
    """Run every Γ-contraction criterion in order and combine them."""
    tol = pair.tol.assert_tol
    verdicts: Dict[str, bool | None] = {}
    values: Dict[str, float] = {"commutator": pair.commutator_norm}

    def report(overall: Verdict, violation: str | None = None, fundamental=None):
        return GammaReport(overall, verdicts, values, violation, fundamental)

    values["norm_S"] = op_norm(pair.S)
    verdicts["norm_S"] = values["norm_S"] <= 2 + tol
    if not verdicts["norm_S"]:
        return report(Verdict.CERTIFIED_NOT, "‖S‖ ≤ 2")

    values["norm_P"] = op_norm(pair.P)
    verdicts["norm_P"] = values["norm_P"] <= 1 + tol
    if not verdicts["norm_P"]:
        return report(Verdict.CERTIFIED_NOT, "‖P‖ ≤ 1")

    in_gamma, worst = _spectrum_in_gamma(pair, seed)
    values["max_root_modulus"] = worst
    verdicts["spectrum_in_gamma"] = in_gamma
    if not in_gamma:
        return report(Verdict.CERTIFIED_NOT, "σ(S, P) ⊆ Γ")

    fundamental = None
    try:
        fundamental = fundamental_operator(pair)
    except SolvesDisagree as e:
        values["cross_check"] = e.residual
        verdicts["fundamental_operator"] = None
        overall = Verdict.INCONCLUSIVE
    except NotSolvable as e:
        values["fundamental_residual"] = e.residual
        verdicts["fundamental_operator"] = False
        if e.residual > 10 * tol:
            return report(Verdict.CERTIFIED_NOT, "S − S*P = D_P X D_P solvable")
        overall = Verdict.INCONCLUSIVE
    else:
        values["fundamental_residual"] = fundamental.residual
        values["omega_F"] = fundamental.omega
        if fundamental.omega > 1 + 10 * tol:
            verdicts["fundamental_operator"] = False
            return report(Verdict.CERTIFIED_NOT, "ω(F) ≤ 1", fundamental)
        if fundamental.omega > 1 + tol:
            verdicts["fundamental_operator"] = None
            overall = Verdict.INCONCLUSIVE
        else:
            verdicts["fundamental_operator"] = True
            overall = Verdict.CERTIFIED_CONTRACTION

    values["rho_min"] = rho_scan(pair, radial_steps, angular_steps)
    verdicts["rho_scan"] = values["rho_min"] >= -tol
    if not verdicts["rho_scan"]:
        if overall != Verdict.CERTIFIED_CONTRACTION:
            return report(Verdict.CERTIFIED_NOT, "ρ(αS, α²P) ≥ 0", fundamental)
        logger.info(
            "ρ-scan minimum %.3e disagrees with the fundamental-operator criterion",
            values["rho_min"],
        )

    try:
        values["strict_criterion"] = strict_criterion_value(pair)
        verdicts["strict"] = values["strict_criterion"] <= 1 + tol
    except StrictPreconditionFailed:
        verdicts["strict"] = None

    return report(overall, fundamental=fundamental)


def strict_criterion_value(pair: OperatorPair) -> float:
    """ω(D_P^{-1} (S - S*P) D_P^{-1}) for ||P|| < 1 and r(S) < 2."""
    S, P, tol = pair.S, pair.P, pair.tol
    p_norm = op_norm(P)
    if p_norm >= 1 - tol.assert_tol:
        raise StrictPreconditionFailed(f"||P|| = {p_norm:.6f} is not below 1")
    radius = spectral_radius(S)
    if radius >= 2 - tol.assert_tol:
        raise StrictPreconditionFailed(
            f"Spectral radius of S = {radius:.6f} is not below 2"
        )
    w, V = hermitian_eig(_eye(pair.dim) - adjoint(P) @ P, tol)
    D_inv = (V / np.sqrt(w)) @ adjoint(V)
    return numerical_radius(D_inv @ (S - adjoint(S) @ P) @ D_inv)


def is_gamma_contraction_strict(pair: OperatorPair) -> bool:
    """The invertible-defect criterion: ω(D_P^{-1}(S - S*P)D_P^{-1}) <= 1."""
    return strict_criterion_value(pair) <= 1 + pair.tol.assert_tol


def is_normal(A: ComplexMatrix, tol: float = 1e-8) -> bool:
    return op_norm(adjoint(A) @ A - A @ adjoint(A)) <= tol


def is_hyponormal(A: ComplexMatrix, tol: float = 1e-8) -> bool:
    """A*A - AA* is positive semidefinite (to tol)."""
    C = adjoint(A) @ A - A @ adjoint(A)
    return float(np.linalg.eigvalsh((C + adjoint(C)) / 2)[0]) >= -tol


def is_gamma_unitary(
    pair: OperatorPair, method: UnitaryMethod = UnitaryMethod.ALGEBRAIC
) -> bool:
    """Γ-unitary test by the algebraic relations or the modulus identity."""
    S, P, tol = pair.S, pair.P, pair.tol.assert_tol
    I = _eye(pair.dim)
    method = UnitaryMethod(method)
    if method == UnitaryMethod.ALGEBRAIC:
        return (
            op_norm(adjoint(P) @ P - I) <= tol
            and op_norm(P @ adjoint(P) - I) <= tol
            and op_norm(adjoint(P) @ S - adjoint(S)) <= tol
            and op_norm(S) <= 2 + tol
        )
    if not is_normal(P, tol):
        return False
    if op_norm(S - adjoint(S) @ P) > tol:
        return False
    M = S @ S - 4 * P
    return op_norm(operator_modulus(M) + adjoint(S) @ S - 4 * I) <= tol


def is_gamma_isometry(pair: OperatorPair) -> bool:
    """P*P = I, P*S = S* and ||S|| <= 2."""
    S, P, tol = pair.S, pair.P, pair.tol.assert_tol
    return (
        op_norm(adjoint(P) @ P - _eye(pair.dim)) <= tol
        and op_norm(adjoint(P) @ S - adjoint(S)) <= tol
        and op_norm(S) <= 2 + tol
    )


def _require_s_equals_s_star_p(pair: OperatorPair) -> None:
    gap = op_norm(pair.S - adjoint(pair.S) @ pair.P)
    if gap > pair.tol.assert_tol:
        raise PreconditionFailed(f"S = S*P fails: ||S - S*P|| = {gap:.3e}")


def hyponormal_transfer_check(pair: OperatorPair) -> float:
    """||(S*S - SS*) - S*(P*P - PP*)S||, an identity whenever S = S*P."""
    _require_s_equals_s_star_p(pair)
    S, P = pair.S, pair.P
    lhs = adjoint(S) @ S - S @ adjoint(S)
    rhs = adjoint(S) @ (adjoint(P) @ P - P @ adjoint(P)) @ S
    return op_norm(lhs - rhs)


def normality_transfer(pair: OperatorPair) -> Dict[str, float | bool]:
    """Whether normality / hyponormality of P carries over to S when S = S*P."""
    residual = hyponormal_transfer_check(pair)
    tol = pair.tol.assert_tol
    result = {
        "identity_residual": residual,
        "P_normal": is_normal(pair.P, tol),
        "S_normal": is_normal(pair.S, tol),
        "P_hyponormal": is_hyponormal(pair.P, tol),
        "S_hyponormal": is_hyponormal(pair.S, tol),
    }
    result["normal_transfers"] = not result["P_normal"] or result["S_normal"]
    result["hyponormal_transfers"] = (
        not result["P_hyponormal"] or result["S_hyponormal"]
    )
    return result


def _monomial_powers(A: ComplexMatrix, degree: int) -> list:
    powers = [_eye(A.shape[0])]
    for _ in range(degree):
        powers.append(powers[-1] @ A)
    return powers


def von_neumann_check(
    pair: OperatorPair,
    degree: int = 4,
    trials: int = 50,
    boundary_samples: int = 256,
    seed: int = 0,
) -> float:
    """Worst ratio ||f(S, P)|| / max over bΓ of |f| for random polynomials.

    The supremum of |f| over Γ is attained on bΓ, sampled here on a regular
    ``boundary_samples`` x ``boundary_samples`` torus grid. Evidence only.
    """
    if degree < 1 or trials < 1 or boundary_samples < 2:
        raise ValueError("degree, trials and boundary_samples must be positive")
    rng = np.random.default_rng(seed)
    S_pow = _monomial_powers(pair.S, degree)
    P_pow = _monomial_powers(pair.P, degree)
    angles = 2 * np.pi * np.arange(boundary_samples) / boundary_samples
    z1, z2 = np.meshgrid(np.exp(1j * angles), np.exp(1j * angles))
    s_vals, p_vals = (z1 + z2).ravel(), (z1 * z2).ravel()
    terms = [(i, j) for i in range(degree + 1) for j in range(degree + 1 - i)]

    worst = 0.0
    for _ in range(trials):
        coeffs = rng.standard_normal(len(terms)) + 1j * rng.standard_normal(len(terms))
        f_op = sum(c * S_pow[i] @ P_pow[j] for c, (i, j) in zip(coeffs, terms))
        f_bd = sum(c * s_vals**i * p_vals**j for c, (i, j) in zip(coeffs, terms))
        sup = float(np.abs(f_bd).max())
        if sup > 0:
            worst = max(worst, op_norm(f_op) / sup)
    logger.debug("von Neumann sampler worst ratio %.6f", worst)
    return worst
