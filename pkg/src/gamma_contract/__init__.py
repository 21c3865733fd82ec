"""
Gamma-Contract - numerical analysis of commuting pairs on the symmetrized bidisc.
"""

__version__ = "0.1.0"

from .analysis import (
    fundamental_operator,
    is_gamma_contraction,
    is_gamma_contraction_strict,
    is_gamma_isometry,
    is_gamma_unitary,
)
from .config import ConfigLoader, ConfigurationError, MatrixFileError
from .dilation import build_dilation, central_gamma_unitary_check, verify_dilation
from .geometry import classify, in_b_gamma, in_gamma, symmetrize_point
from .models import (
    AnalysisConfig,
    DecompositionResult,
    EmbeddingResult,
    ExampleParams,
    FundamentalOp,
    GammaReport,
    MembershipReport,
    OperatorPair,
    PointPair,
    ReproReport,
    Tolerances,
    Verdict,
)
from .symmetrization import decompose, embed_and_split, symmetrize_ops

__all__ = [
    "ConfigLoader",
    "ConfigurationError",
    "MatrixFileError",
    "AnalysisConfig",
    "Tolerances",
    "PointPair",
    "MembershipReport",
    "OperatorPair",
    "FundamentalOp",
    "GammaReport",
    "Verdict",
    "DecompositionResult",
    "EmbeddingResult",
    "ExampleParams",
    "ReproReport",
    "symmetrize_point",
    "in_gamma",
    "in_b_gamma",
    "classify",
    "fundamental_operator",
    "is_gamma_contraction",
    "is_gamma_contraction_strict",
    "is_gamma_unitary",
    "is_gamma_isometry",
    "symmetrize_ops",
    "decompose",
    "embed_and_split",
    "build_dilation",
    "verify_dilation",
    "central_gamma_unitary_check",
]
