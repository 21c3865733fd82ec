"""
Dense complex linear-algebra primitives.

Everything here is a pure function of its inputs. Random choices (the generic
combination used by ``joint_spectrum``) come from an explicitly seeded
``numpy.random.Generator``.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
import scipy.linalg

from .models import ComplexMatrix, NotCommuting, Tolerances, as_matrix

logger = logging.getLogger(__name__)

# Eigenvalues closer than this relative distance share a square-root branch.
CLUSTER_RTOL = 1e-8

NUMERICAL_RADIUS_GRID = 1024
NUMERICAL_RADIUS_WINDOW = 1e-6
NUMERICAL_RADIUS_WIDTH = 1e-12


class LinalgError(Exception):
    """Base class for linear-algebra failures."""

    pass


class NotHermitian(LinalgError):
    pass


class NotPSD(LinalgError):
    pass


class NoPrimarySqrt(LinalgError):
    """The Schur-Parlett recurrence broke down: no primary square root."""

    pass


class TriangularizationFailed(LinalgError):
    pass


def _square(A: ComplexMatrix, name: str = "matrix") -> ComplexMatrix:
    A = as_matrix(A, name)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    return A


def adjoint(A: ComplexMatrix) -> ComplexMatrix:
    return np.asarray(A).conj().T


def commutator(A: ComplexMatrix, B: ComplexMatrix) -> ComplexMatrix:
    """[A, B] = AB - BA."""
    return A @ B - B @ A


def op_norm(A: ComplexMatrix) -> float:
    """Largest singular value (0 for an empty matrix)."""
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(A)[0])


def spectral_radius(A: ComplexMatrix) -> float:
    A = _square(A)
    return float(np.max(np.abs(scipy.linalg.eigvals(A))))


def hermitian_defect(A: ComplexMatrix) -> float:
    """Scale-invariant distance from Hermitian: ||A - A*|| / (1 + ||A||)."""
    return op_norm(A - adjoint(A)) / (1.0 + op_norm(A))


def _lambda_max(A: ComplexMatrix, theta: float) -> float:
    rotated = np.exp(1j * theta) * A
    H = (rotated + adjoint(rotated)) / 2
    return float(np.linalg.eigvalsh(H)[-1])


def _ternary_max(A: ComplexMatrix, lo: float, hi: float, width: float) -> float:
    best = max(_lambda_max(A, lo), _lambda_max(A, hi))
    while hi - lo > width:
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        f1 = _lambda_max(A, m1)
        f2 = _lambda_max(A, m2)
        best = max(best, f1, f2)
        if f1 < f2:
            lo = m1
        else:
            hi = m2
    return max(best, _lambda_max(A, (lo + hi) / 2))


def numerical_radius(
    A: ComplexMatrix,
    grid: int = NUMERICAL_RADIUS_GRID,
    width: float = NUMERICAL_RADIUS_WIDTH,
) -> float:
    """ω(A) = max over θ of λ_max((e^{iθ}A + e^{-iθ}A*)/2).

    The θ-function is evaluated on a uniform grid, then every local grid
    maximum close enough to the best sample to hide the true maximum (the
    θ-function is ||A||-Lipschitz) is refined by ternary search on its two
    neighbouring cells.
    """
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return 0.0
    A = _square(A)
    if A.shape[0] == 1:
        return float(abs(A[0, 0]))

    thetas = 2 * np.pi * np.arange(grid) / grid
    phases = np.exp(1j * thetas)[:, None, None]
    stacked = phases * A[None, :, :]
    H = (stacked + np.conj(np.transpose(stacked, (0, 2, 1)))) / 2
    values = np.linalg.eigvalsh(H)[:, -1]

    best = float(values.max())
    if best - float(values.min()) <= 1e-14 * (1 + abs(best)):
        return best

    step = 2 * np.pi / grid
    # A peak between grid points exceeds its nearest sample by at most ||A|| * step.
    window = max(NUMERICAL_RADIUS_WINDOW, op_norm(A) * step)
    prev_vals = np.roll(values, 1)
    next_vals = np.roll(values, -1)
    is_peak = (values >= prev_vals) & (values >= next_vals)
    candidates = np.flatnonzero(is_peak & (values >= best - window))

    # Plateaus produce runs of adjacent peaks; one representative per run.
    kept: List[int] = []
    for idx in candidates:
        if kept and (idx - kept[-1]) == 1:
            continue
        kept.append(int(idx))

    for idx in kept:
        theta = thetas[idx]
        best = max(best, _ternary_max(A, theta - step, theta + step, width))
    return best


def hermitian_eig(
    A: ComplexMatrix, tol: Tolerances = Tolerances()
) -> Tuple[np.ndarray, ComplexMatrix]:
    """Eigen-decomposition of a PSD Hermitian matrix with tiny negatives clamped."""
    A = _square(A)
    defect = hermitian_defect(A)
    if defect > tol.assert_tol:
        raise NotHermitian(
            f"Matrix is not Hermitian: ||A - A*||/(1+||A||) = {defect:.3e}"
        )
    H = (A + adjoint(A)) / 2
    w, V = scipy.linalg.eigh(H)
    if w[0] < -tol.assert_tol:
        raise NotPSD(f"Matrix has eigenvalue {w[0]:.3e} < -{tol.assert_tol:.1e}")
    return np.clip(w, 0.0, None), V


def psd_sqrt(A: ComplexMatrix, tol: Tolerances = Tolerances()) -> ComplexMatrix:
    """The unique positive semidefinite square root of a PSD Hermitian matrix."""
    w, V = hermitian_eig(A, tol)
    return (V * np.sqrt(w)) @ adjoint(V)


def operator_modulus(M: ComplexMatrix) -> ComplexMatrix:
    """|M| = psd_sqrt(M*M), computed from the SVD so small singular values survive."""
    M = _square(M, "M")
    _, sigma, Wh = scipy.linalg.svd(M)
    return (adjoint(Wh) * sigma) @ Wh


def _cluster_representatives(values: Sequence[complex], cutoff: float) -> List[complex]:
    reps: List[complex] = []
    for lam in values:
        if not any(_same_cluster(lam, rep, cutoff) for rep in reps):
            reps.append(complex(lam))
    return sorted(reps, key=lambda z: (round(z.real, 12), round(z.imag, 12)))


def _same_cluster(a: complex, b: complex, cutoff: float) -> bool:
    return abs(a - b) <= CLUSTER_RTOL * max(abs(a), abs(b)) + cutoff


def _cluster_labels(values: Sequence[complex], reps: Sequence[complex]) -> List[int]:
    return [int(np.argmin([abs(lam - rep) for rep in reps])) for lam in values]


def eigenvalue_clusters(
    M: ComplexMatrix, tol: Tolerances = Tolerances()
) -> List[complex]:
    """Distinct eigenvalues of M up to the branch-sharing cluster radius.

    The order matches the ``branch_signs`` vector taken by ``primary_sqrt``.
    """
    M = _square(M, "M")
    T, _ = scipy.linalg.schur(M, output="complex")
    return _cluster_representatives(np.diag(T), tol.rank_cutoff)


def primary_sqrt(
    M: ComplexMatrix,
    branch_signs: Sequence[int] | None = None,
    tol: Tolerances = Tolerances(),
) -> ComplexMatrix:
    """Primary square root via complex Schur form and the Parlett recurrence.

    ``branch_signs`` holds one ±1 per entry of ``eigenvalue_clusters(M)``;
    the default takes the principal root on every cluster.
    """
    M = _square(M, "M")
    n = M.shape[0]
    T, Z = scipy.linalg.schur(M, output="complex")
    diag = np.diag(T)
    reps = _cluster_representatives(diag, tol.rank_cutoff)
    if branch_signs is None:
        branch_signs = [1] * len(reps)
    if len(branch_signs) != len(reps):
        raise ValueError(
            f"Expected {len(reps)} branch signs (one per distinct eigenvalue), "
            f"got {len(branch_signs)}"
        )
    if any(sign not in (1, -1) for sign in branch_signs):
        raise ValueError(f"Branch signs must be +1 or -1, got {list(branch_signs)}")

    labels = _cluster_labels(diag, reps)
    ref_roots = [sign * np.sqrt(rep) for sign, rep in zip(branch_signs, reps)]

    R = np.zeros((n, n), dtype=complex)
    for i, lam in enumerate(diag):
        root = np.sqrt(lam)
        ref = ref_roots[labels[i]]
        if abs(root - ref) > abs(root + ref):
            root = -root
        R[i, i] = root

    scale = 1.0 + op_norm(M)
    for j in range(n):
        for i in range(j - 1, -1, -1):
            numer = T[i, j] - R[i, i + 1 : j] @ R[i + 1 : j, j]
            denom = R[i, i] + R[j, j]
            if abs(denom) < tol.rank_cutoff:
                if abs(numer) <= tol.assert_tol * scale:
                    R[i, j] = 0.0
                    continue
                raise NoPrimarySqrt(
                    f"Parlett recurrence divides by {abs(denom):.2e} at ({i}, {j}) "
                    f"with numerator {abs(numer):.2e}; M has no primary square root"
                )
            R[i, j] = numer / denom

    X = Z @ R @ adjoint(Z)
    err = op_norm(X @ X - M)
    if err > tol.assert_tol * scale:
        raise NoPrimarySqrt(f"Square root residual {err:.2e} exceeds tolerance")
    return X


def _lower_mass(A: ComplexMatrix) -> float:
    return float(np.linalg.norm(np.tril(A, -1)))


def _triangular_enough(
    S: ComplexMatrix, P: ComplexMatrix, Z: ComplexMatrix, tol: Tolerances
) -> bool:
    Sz = adjoint(Z) @ S @ Z
    Pz = adjoint(Z) @ P @ Z
    return _lower_mass(Sz) <= tol.assert_tol * (1 + op_norm(S)) and _lower_mass(
        Pz
    ) <= tol.assert_tol * (1 + op_norm(P))


def _complete_to_unitary(v: np.ndarray) -> ComplexMatrix:
    n = v.shape[0]
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(n, dtype=complex)]))
    return Q[:, :n]


def _common_flag(S: ComplexMatrix, P: ComplexMatrix, tol: Tolerances) -> ComplexMatrix:
    """Unitary Z triangularizing S and P together, by deflating common eigenvectors."""
    n = S.shape[0]
    if n == 1:
        return np.eye(1, dtype=complex)
    lam = scipy.linalg.eigvals(S)[0]
    _, sv, Vh = np.linalg.svd(S - lam * np.eye(n))
    thresh = np.sqrt(tol.assert_tol) * (1 + op_norm(S))
    k = max(1, int(np.sum(sv <= thresh)))
    K = adjoint(Vh)[:, n - k :]
    _, w = scipy.linalg.eig(adjoint(K) @ P @ K)
    v = K @ w[:, 0]
    v = v / np.linalg.norm(v)
    Q = _complete_to_unitary(v)
    rest = Q[:, 1:]
    Z_rest = _common_flag(adjoint(rest) @ S @ rest, adjoint(rest) @ P @ rest, tol)
    return Q @ scipy.linalg.block_diag(np.eye(1), Z_rest)


def joint_spectrum(
    S: ComplexMatrix,
    P: ComplexMatrix,
    tol: Tolerances = Tolerances(),
    seed: int = 0,
) -> List[Tuple[complex, complex]]:
    """Simultaneously triangularize a commuting pair and read off diagonal pairs."""
    S = _square(S, "S")
    P = _square(P, "P")
    if S.shape != P.shape:
        raise ValueError(f"S and P differ in shape: {S.shape} vs {P.shape}")
    defect = op_norm(commutator(S, P))
    bound = tol.comm_tol * (1 + op_norm(S) * op_norm(P))
    if defect > bound:
        raise NotCommuting(f"||SP - PS|| = {defect:.3e} exceeds {bound:.3e}")

    rng = np.random.default_rng(seed)
    for attempt in range(5):
        t = np.exp(2j * np.pi * rng.random())
        _, Z = scipy.linalg.schur(S + t * P, output="complex")
        if _triangular_enough(S, P, Z, tol):
            break
        logger.debug("Generic combination %d failed to triangularize", attempt)
    else:
        logger.info("Falling back to common-eigenvector deflation")
        Z = _common_flag(S, P, tol)
        if not _triangular_enough(S, P, Z, tol):
            raise TriangularizationFailed(
                "Could not simultaneously triangularize the pair"
            )

    Sz = adjoint(Z) @ S @ Z
    Pz = adjoint(Z) @ P @ Z
    return [(complex(a), complex(b)) for a, b in zip(np.diag(Sz), np.diag(Pz))]
