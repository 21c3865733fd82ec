"""
Finite windows of the minimal Γ-unitary dilation (T0, U0) of a Γ-contraction.

The dilation space is l2(D_P) ⊕ H ⊕ l2(D_P*). Blocks -N..-1 hold copies of
the defect space of P, block 0 is H and blocks 1..N hold copies of the
defect space of P*. Defect blocks use the orthonormal bases from the
fundamental-operator solver, so every block is a dense reduced matrix.
"""

import itertools
import logging
from typing import Dict

import numpy as np

from .analysis import fundamental_operator
from .linalg import adjoint, commutator, op_norm
from .models import (
    CentralCheckReport,
    ComplexMatrix,
    DilationTruncation,
    OperatorPair,
)

logger = logging.getLogger(__name__)


class DegreeTooHigh(ValueError):
    pass


class TruncationTooSmall(ValueError):
    pass


def _empty(trunc_dim: int) -> ComplexMatrix:
    return np.zeros((trunc_dim, trunc_dim), dtype=complex)


def build_dilation(pair: OperatorPair, N: int) -> DilationTruncation:
    """Assemble T0 and U0 on blocks -N..N, dropping everything outside the window."""
    if N < 1:
        raise TruncationTooSmall(f"Need at least one defect block per side, got {N}")
    S, P = pair.S, pair.P
    F = fundamental_operator(pair)
    Fstar = fundamental_operator(pair.adjoint())

    n = pair.dim
    k, k_star = F.defect_dim, Fstar.defect_dim
    dim = N * k + n + N * k_star
    trunc = DilationTruncation(
        N=N,
        T0=_empty(dim),
        U0=_empty(dim),
        center_offset=N * k,
        F=F,
        Fstar=Fstar,
        dim_h=n,
    )
    T0, U0 = trunc.T0, trunc.U0
    blk = trunc.block_slice

    V, d = F.defect_basis, F.defect_values
    V_star, d_star = Fstar.defect_basis, Fstar.defect_values
    Fm, Fm_adj = F.F, adjoint(F.F)
    G, G_adj = Fstar.F, adjoint(Fstar.F)

    # Coordinates of D_P h0, P* h1 and D_P* h1 in the reduced bases.
    D_P_h0 = d[:, None] * adjoint(V)
    P_star_h1 = adjoint(V) @ adjoint(P) @ V_star
    D_Pstar_h1 = V_star * d_star

    if k:
        for j in range(N, 1, -1):
            T0[blk(-j), blk(-j)] = Fm
            T0[blk(-j), blk(-j + 1)] = Fm_adj
            U0[blk(-j), blk(-j + 1)] = np.eye(k)
        T0[blk(-1), blk(-1)] = Fm
        T0[blk(-1), blk(0)] = Fm_adj @ D_P_h0
        U0[blk(-1), blk(0)] = D_P_h0
        if k_star:
            T0[blk(-1), blk(1)] = -Fm_adj @ P_star_h1
            U0[blk(-1), blk(1)] = -P_star_h1

    T0[blk(0), blk(0)] = S
    U0[blk(0), blk(0)] = P
    if k_star:
        T0[blk(0), blk(1)] = D_Pstar_h1 @ G
        U0[blk(0), blk(1)] = D_Pstar_h1
        for j in range(1, N + 1):
            T0[blk(j), blk(j)] = G_adj
            if j < N:
                T0[blk(j), blk(j + 1)] = G
                U0[blk(j), blk(j + 1)] = np.eye(k_star)

    logger.debug(
        "Built dilation window N=%d: defect dims (%d, %d), total dimension %d",
        N,
        k,
        k_star,
        dim,
    )
    return trunc


def compression_residual(
    trunc: DilationTruncation, pair: OperatorPair, degree: int
) -> float:
    """max over words w of length <= degree of ||P_H w(T0, U0)|_H - w(S, P)||."""
    h = trunc.h_slice
    letters = ((trunc.T0, pair.S), (trunc.U0, pair.P))
    # Each entry is (w(T0, U0) restricted to H columns, w(S, P)).
    frontier = [(np.eye(trunc.T0.shape[0], dtype=complex)[:, h], np.eye(pair.dim))]
    worst = 0.0
    for _ in range(degree):
        frontier = [
            (big @ lifted, small @ word)
            for (big, small), (lifted, word) in itertools.product(letters, frontier)
        ]
        for lifted, word in frontier:
            worst = max(worst, op_norm(lifted[h, :] - word))
    return worst


def require_window(N: int, max_total_degree: int) -> None:
    """Words of degree d only see blocks -d..d, so the window needs N > d."""
    if max_total_degree >= N:
        raise DegreeTooHigh(
            f"Degree {max_total_degree} needs a window of at least "
            f"{max_total_degree + 1} blocks per side, got {N}"
        )


def verify_dilation(pair: OperatorPair, N: int, max_total_degree: int) -> float:
    """Compression residual of the window for every word of total degree <= d."""
    require_window(N, max_total_degree)
    return compression_residual(build_dilation(pair, N), pair, max_total_degree)


def _central(trunc: DilationTruncation) -> np.ndarray:
    return trunc.indices(range(-trunc.N + 1, trunc.N))


def central_gamma_unitary_check(trunc: DilationTruncation) -> CentralCheckReport:
    """Γ-unitary relations for (T0, U0) on blocks away from the window edges."""
    if trunc.N < 3:
        raise TruncationTooSmall(f"Central check needs N >= 3, got {trunc.N}")
    idx = _central(trunc)
    T0, U0 = trunc.T0, trunc.U0
    I = np.eye(T0.shape[0])

    def restricted(M: ComplexMatrix) -> float:
        return op_norm(M[np.ix_(idx, idx)])

    return CentralCheckReport(
        unitarity=restricted(adjoint(U0) @ U0 - I),
        co_unitarity=restricted(U0 @ adjoint(U0) - I),
        adjoint_relation=restricted(adjoint(U0) @ T0 - adjoint(T0)),
        central_blocks=(-trunc.N + 1, trunc.N - 1),
    )


def _self_commutator(A: ComplexMatrix) -> ComplexMatrix:
    return commutator(adjoint(A), A)


def lift_commutation_check(
    pair: OperatorPair, other: OperatorPair, N: int = 4
) -> Dict[str, float]:
    """How far the dilations of (S, P) and (S1, P) on the same space are from commuting.

    The two lifts commute exactly when [F, F1] = 0 = [F*, F] - [F1*, F1] and
    the same holds for the fundamental operators of the adjoint pairs.
    """
    gap = op_norm(pair.P - other.P)
    if gap > pair.tol.assert_tol:
        raise ValueError(f"Pairs must share P, ||P - P1|| = {gap:.3e}")
    if N < 3:
        raise TruncationTooSmall(f"Lift commutation check needs N >= 3, got {N}")
    first = build_dilation(pair, N)
    second = build_dilation(other, N)
    idx = _central(first)
    F, F1 = first.F.F, second.F.F
    G, G1 = first.Fstar.F, second.Fstar.F
    T_comm = commutator(first.T0, second.T0)
    return {
        "S_commutator": op_norm(commutator(pair.S, other.S)),
        "F_commutator": op_norm(commutator(F, F1)) if F.size else 0.0,
        "F_self_commutator_gap": (
            op_norm(_self_commutator(F) - _self_commutator(F1)) if F.size else 0.0
        ),
        "Fstar_commutator": op_norm(commutator(G, G1)) if G.size else 0.0,
        "Fstar_self_commutator_gap": (
            op_norm(_self_commutator(G) - _self_commutator(G1)) if G.size else 0.0
        ),
        "central_T0_commutator": op_norm(T_comm[np.ix_(idx, idx)]),
    }
