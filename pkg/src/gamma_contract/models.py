"""
Data models for Γ-contraction analysis.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; the dataclasses
below bundle them with the bookkeeping each operation reports.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np

ComplexMatrix = np.ndarray


class NotCommuting(ValueError):
    """Raised when a pair that must commute does not (within comm_tol)."""

    pass


def as_matrix(value: Any, name: str = "matrix") -> ComplexMatrix:
    """Coerce scalars, nested lists and arrays to a finite 2-D complex array."""
    arr = np.asarray(value, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ValueError(f"{name} must have positive dimensions, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def complex_to_pair(z: complex) -> List[float]:
    """Encode a complex number as ``[re, im]``."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


def pair_to_complex(value: Any) -> complex:
    """Decode ``[re, im]`` (or a bare real) into a complex number."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"Complex entry must be [re, im], got {value!r}")
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def matrix_to_document(matrix: ComplexMatrix) -> Dict[str, Any]:
    """Encode a matrix as a MatrixFile document (row-major ``[re, im]`` pairs)."""
    arr = np.asarray(matrix, dtype=complex)
    rows, cols = arr.shape
    return {
        "rows": int(rows),
        "cols": int(cols),
        "data": [complex_to_pair(z) for z in arr.reshape(-1)],
    }


def matrix_from_document(doc: Dict[str, Any]) -> ComplexMatrix:
    """Decode a MatrixFile document; raises ValueError on any inconsistency."""
    if not isinstance(doc, dict):
        raise ValueError("Matrix document must be a mapping with rows, cols, data")
    try:
        rows = int(doc["rows"])
        cols = int(doc["cols"])
        data = doc["data"]
    except KeyError as e:
        raise ValueError(f"Matrix document missing field {e}") from None
    if rows <= 0 or cols <= 0:
        raise ValueError(f"rows and cols must be positive, got {rows}x{cols}")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ValueError(
            f"data must hold rows*cols = {rows * cols} entries, "
            f"got {len(data) if isinstance(data, list) else type(data).__name__}"
        )
    values = np.array([pair_to_complex(entry) for entry in data], dtype=complex)
    return as_matrix(values.reshape(rows, cols))


def encode(value: Any) -> Any:
    """Recursively convert report values into YAML-safe plain Python types."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return matrix_to_document(value)
        return [encode(v) for v in value.tolist()]
    if isinstance(value, (complex, np.complexfloating)):
        return complex_to_pair(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    return value


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by every operation."""

    rank_cutoff: float = 1e-10
    assert_tol: float = 1e-8
    comm_tol: float = 1e-10

    def __post_init__(self):
        for name in ("rank_cutoff", "assert_tol", "comm_tol"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be strictly positive, got {value}")
        if self.rank_cutoff > self.assert_tol:
            raise ValueError(
                f"rank_cutoff ({self.rank_cutoff}) cannot exceed "
                f"assert_tol ({self.assert_tol})"
            )


class Region(str, Enum):
    """Where a scalar pair sits relative to Γ."""

    OPEN_G = "OPEN_G"
    DIST_BOUNDARY = "DIST_BOUNDARY"
    GAMMA_NOT_B = "GAMMA_NOT_B"
    OUTSIDE = "OUTSIDE"


class GammaMethod(str, Enum):
    """Scalar characterizations of membership in Γ."""

    ROOTS = "ROOTS"
    MOEBIUS_II = "MOEBIUS_II"
    SUM_III = "SUM_III"
    BETA_IV = "BETA_IV"


class BoundaryMethod(str, Enum):
    """Scalar characterizations of the distinguished boundary bΓ."""

    MODULUS = "MODULUS"
    NEW_LEMMA = "NEW_LEMMA"


class UnitaryMethod(str, Enum):
    """Operator characterizations of Γ-unitaries."""

    ALGEBRAIC = "ALGEBRAIC"
    NEW_CHAR = "NEW_CHAR"


class ScaleDirection(str, Enum):
    TO_HALF = "TO_HALF"
    FROM_HALF = "FROM_HALF"


class Verdict(str, Enum):
    """Tri-state outcome of Γ-contraction certification."""

    CERTIFIED_CONTRACTION = "CERTIFIED_CONTRACTION"
    CERTIFIED_NOT = "CERTIFIED_NOT"
    INCONCLUSIVE = "INCONCLUSIVE"


class DecompositionStatus(str, Enum):
    OK = "OK"
    NO_SQRT = "NO_SQRT"
    COMMUTANT_FAIL = "COMMUTANT_FAIL"
    NORM_BOUND_FAIL = "NORM_BOUND_FAIL"


@dataclass(frozen=True)
class PointPair:
    """A scalar pair (s, p) in C^2."""

    s: complex
    p: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "p", complex(self.p))
        if not (cmath_isfinite(self.s) and cmath_isfinite(self.p)):
            raise ValueError(f"Point ({self.s}, {self.p}) has non-finite entries")

    def to_dict(self) -> Dict[str, Any]:
        return {"s": complex_to_pair(self.s), "p": complex_to_pair(self.p)}


def cmath_isfinite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass
class MembershipReport:
    """Region classification of a scalar pair with every method's verdict."""

    point: PointPair
    region: Region
    beta_witness: complex | None
    root_moduli: Tuple[float, float]
    per_method_verdicts: Dict[str, bool]

    @property
    def in_gamma(self) -> bool:
        return self.region != Region.OUTSIDE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": self.point.to_dict(),
            "region": self.region.value,
            "beta_witness": (
                None
                if self.beta_witness is None
                else complex_to_pair(self.beta_witness)
            ),
            "root_moduli": [float(m) for m in self.root_moduli],
            "per_method_verdicts": dict(self.per_method_verdicts),
        }


@dataclass
class OperatorPair:
    """A commuting square matrix pair (S, P) with its tolerance context."""

    S: ComplexMatrix
    P: ComplexMatrix
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        self.S = as_matrix(self.S, "S")
        self.P = as_matrix(self.P, "P")
        if self.S.shape[0] != self.S.shape[1]:
            raise ValueError(f"S must be square, got shape {self.S.shape}")
        if self.S.shape != self.P.shape:
            raise ValueError(
                f"S and P must have equal dimension, got {self.S.shape} "
                f"and {self.P.shape}"
            )
        defect = self.commutator_norm
        bound = self.tol.comm_tol * (
            1 + np.linalg.norm(self.S, 2) * np.linalg.norm(self.P, 2)
        )
        if defect > bound:
            raise NotCommuting(
                f"||SP - PS|| = {defect:.3e} exceeds {bound:.3e}; "
                f"S and P do not commute"
            )

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    @property
    def commutator_norm(self) -> float:
        return float(np.linalg.norm(self.S @ self.P - self.P @ self.S, 2))

    def adjoint(self) -> "OperatorPair":
        """The pair (S*, P*)."""
        return OperatorPair(self.S.conj().T, self.P.conj().T, self.tol)

    def with_tol(self, tol: Tolerances) -> "OperatorPair":
        return OperatorPair(self.S, self.P, tol)


@dataclass
class FundamentalOp:
    """Solution F of D_P X D_P = S - S*P, expressed on an orthonormal defect basis."""

    F: ComplexMatrix
    defect_basis: ComplexMatrix
    defect_values: np.ndarray
    residual: float
    omega: float
    cross_check: float | None = None

    @property
    def defect_dim(self) -> int:
        return self.defect_basis.shape[1]

    def full(self) -> ComplexMatrix:
        """F conjugated back to the ambient space: V F V*."""
        V = self.defect_basis
        return V @ self.F @ V.conj().T

    def summary(self) -> Dict[str, Any]:
        return {
            "defect_dim": self.defect_dim,
            "residual": float(self.residual),
            "omega": float(self.omega),
            "norm": float(np.linalg.norm(self.F, 2)) if self.defect_dim else 0.0,
            "cross_check": (
                None if self.cross_check is None else float(self.cross_check)
            ),
        }


@dataclass
class GammaReport:
    """Outcome of every Γ-contraction criterion run on a pair."""

    overall: Verdict
    verdicts: Dict[str, bool | None]
    values: Dict[str, float]
    violation: str | None = None
    fundamental: FundamentalOp | None = None

    def __post_init__(self):
        if self.overall == Verdict.CERTIFIED_NOT and not self.violation:
            raise ValueError("CERTIFIED_NOT requires a named violated condition")

    @property
    def is_certified(self) -> bool:
        return self.overall == Verdict.CERTIFIED_CONTRACTION

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "overall": self.overall.value,
            "violation": self.violation,
            "verdicts": dict(self.verdicts),
            "values": encode(self.values),
        }
        if self.fundamental is not None:
            doc["fundamental_operator"] = self.fundamental.summary()
        return doc


@dataclass
class DecompositionResult:
    """Outcome of splitting (S, P) into commuting T1, T2 with T1 + T2 = S, T1 T2 = P."""

    status: DecompositionStatus
    T1: ComplexMatrix | None = None
    T2: ComplexMatrix | None = None
    delta: ComplexMatrix | None = None
    norms: Tuple[float, float] | None = None
    branches_tried: int = 0
    note: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == DecompositionStatus.OK

    def to_dict(self) -> Dict[str, Any]:
        doc: Dict[str, Any] = {
            "status": self.status.value,
            "branches_tried": self.branches_tried,
            "norms": None if self.norms is None else [float(n) for n in self.norms],
            "note": self.note,
        }
        if self.ok:
            doc["T1"] = matrix_to_document(self.T1)
            doc["T2"] = matrix_to_document(self.T2)
        return doc


@dataclass
class EmbeddingResult:
    """Commuting T1, T2 on H ⊕ H whose symmetrization is (S ⊕ S, P ⊕ P)."""

    T1: ComplexMatrix
    T2: ComplexMatrix
    block_layout: str
    residuals: Dict[str, float]
    norms: Tuple[float, float]
    recertified: bool | None = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "block_layout": self.block_layout,
            "recertified": self.recertified,
            "norms": [float(n) for n in self.norms],
            "residuals": encode(self.residuals),
            "T1": matrix_to_document(self.T1),
            "T2": matrix_to_document(self.T2),
        }


@dataclass
class DilationTruncation:
    """Finite window of the block matrices T0, U0 on l2(D_P) ⊕ H ⊕ l2(D_P*).

    Blocks are indexed -N..-1 (D_P side), 0 (H) and 1..N (D_P* side).
    """

    N: int
    T0: ComplexMatrix
    U0: ComplexMatrix
    center_offset: int
    F: FundamentalOp
    Fstar: FundamentalOp
    dim_h: int

    @property
    def dim_defect(self) -> int:
        return self.F.defect_dim

    @property
    def dim_defect_star(self) -> int:
        return self.Fstar.defect_dim

    def block_slice(self, index: int) -> slice:
        """Rows/columns of block ``index`` in the assembled matrices."""
        if not -self.N <= index <= self.N:
            raise IndexError(f"Block {index} outside window -{self.N}..{self.N}")
        if index < 0:
            start = (index + self.N) * self.dim_defect
            return slice(start, start + self.dim_defect)
        if index == 0:
            return slice(self.center_offset, self.center_offset + self.dim_h)
        start = (
            self.center_offset + self.dim_h + (index - 1) * self.dim_defect_star
        )
        return slice(start, start + self.dim_defect_star)

    @property
    def h_slice(self) -> slice:
        return self.block_slice(0)

    def indices(self, blocks: range) -> np.ndarray:
        """Flat index array covering the listed blocks."""
        parts = [np.arange(self.T0.shape[0])[self.block_slice(b)] for b in blocks]
        return np.concatenate(parts) if parts else np.array([], dtype=int)


@dataclass
class CentralCheckReport:
    """Γ-unitary relation violations on the central blocks of a truncation."""

    unitarity: float
    co_unitarity: float
    adjoint_relation: float
    central_blocks: Tuple[int, int]

    @property
    def max_violation(self) -> float:
        return max(self.unitarity, self.co_unitarity, self.adjoint_relation)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "central_blocks": list(self.central_blocks),
            "unitarity": float(self.unitarity),
            "co_unitarity": float(self.co_unitarity),
            "adjoint_relation": float(self.adjoint_relation),
            "max_violation": float(self.max_violation),
        }


COUNTER_1_SCALARS = ("q", "w", "y")


def _default_counter_1() -> Dict[str, Any]:
    return {
        "q": 0.5,
        "w": 0.5,
        "y": 0.4,
        "R": np.array([[0.3, 0.1], [0, 0.3]], dtype=complex),
    }


def _default_counter_2() -> Dict[str, ComplexMatrix]:
    return {
        "A": 0.3 * np.eye(2, dtype=complex),
        "B": 0.3 * np.array([[1, 1], [0, 1]], dtype=complex),
        "T": 0.5 * np.eye(2, dtype=complex),
    }


@dataclass
class ExampleParams:
    """Parameters of the worked examples and counterexamples."""

    epsilon: float = 1 / 1.3
    r: float = 0.005
    z: complex = 5.0
    delta: float = 0.01
    search_trials: int = 500
    seed: int = 0
    counterexample_1: Dict[str, Any] = field(default_factory=_default_counter_1)
    counterexample_2: Dict[str, ComplexMatrix] = field(
        default_factory=_default_counter_2
    )

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.r < 0.01:
            raise ValueError(f"r must lie in (0, 1/100), got {self.r}")
        if not 0 < self.delta < 2:
            raise ValueError(f"delta must lie in (0, 2), got {self.delta}")
        self.z = complex(self.z)
        self.counterexample_1 = {
            k: as_matrix(v, k) if k == "R" else complex(v)
            for k, v in self.counterexample_1.items()
        }
        R = self.counterexample_1.get("R")
        if R is not None and R.shape != (2, 2):
            raise ValueError(f"counterexample_1 R must be 2x2, got {R.shape}")
        self.counterexample_2 = {
            k: as_matrix(v, k) for k, v in self.counterexample_2.items()
        }


@dataclass
class ReproReport:
    """Machine-readable record of one reproduced example."""

    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)
    verdicts: Dict[str, Any] = field(default_factory=dict)
    assertions: Dict[str, bool] = field(default_factory=dict)
    informational: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.assertions.values())

    def check(self, label: str, condition: bool) -> bool:
        """Record an assertion outcome under ``label``."""
        self.assertions[label] = bool(condition)
        return bool(condition)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "example": self.name,
            "passed": self.passed,
            "params": encode(self.params),
            "values": encode(self.values),
            "verdicts": encode(self.verdicts),
            "assertions": encode(self.assertions),
            "informational": list(self.informational),
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "ReproReport":
        return cls(
            name=doc["example"],
            params=doc.get("params", {}),
            values=doc.get("values", {}),
            verdicts=doc.get("verdicts", {}),
            assertions=doc.get("assertions", {}),
            informational=doc.get("informational", []),
        )


@dataclass
class AnalysisConfig:
    """Settings shared by every command; each CLI flag overrides one field."""

    tolerances: Tolerances = field(default_factory=Tolerances)
    scan_radial: int = 32
    scan_angular: int = 64
    blocks: int = 8
    max_degree: int = 6
    seed: int = 0
    branch_search: bool = False
    search_trials: int = 500
    newton_iterations: int = 40
    examples: ExampleParams = field(default_factory=ExampleParams)

    def __post_init__(self):
        for name in ("scan_radial", "scan_angular", "blocks", "search_trials"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
        if not isinstance(self.max_degree, int) or self.max_degree < 0:
            raise ValueError(
                f"max_degree must be a non-negative integer, got {self.max_degree!r}"
            )
        if not isinstance(self.newton_iterations, int) or self.newton_iterations < 1:
            raise ValueError(
                f"newton_iterations must be a positive integer, "
                f"got {self.newton_iterations!r}"
            )