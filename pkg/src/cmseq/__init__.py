"""Nonsingular Gaussian conditionally-Markov sequences.

Build recursive dynamic models from covariance functions, simulate them,
recover the covariance a model implies, classify sequences by the block
support of their precision matrix, cross-check every verdict against
conditioning-based oracles, and generate destination-aware trajectory
ensembles. The ``cmseq`` console script exposes the same operations on
JSON/CSV files.
"""

from .covariance import BlockCovariance, Boundary, ar1_covariance, random_spd_covariance
from .errors import DomainError, NotPositiveDefinite, ShapeMismatch
from .linalg import (
    GaussianConditional,
    SPDMatrix,
    cholesky,
    condition,
    invert_spd,
    sample_mvn,
)
from .model import (
    CMcModel,
    TrajectoryBatch,
    construct_model,
    extract_residuals,
    implied_covariance,
    random_model,
    simulate,
)
from .oracle import OracleReport, cm_oracle, markov_oracle, reciprocal_oracle
from .patterns import (
    ClassLabels,
    CMcPattern,
    PatternForm,
    PatternViolation,
    classify,
    pattern_check,
    random_cm_instance,
)
from .trajectory import EnsembleSummary, destination_model, generate_ensemble

__version__ = "0.1.0"

__all__ = [
    "BlockCovariance",
    "Boundary",
    "CMcModel",
    "CMcPattern",
    "ClassLabels",
    "DomainError",
    "EnsembleSummary",
    "GaussianConditional",
    "NotPositiveDefinite",
    "OracleReport",
    "PatternForm",
    "PatternViolation",
    "SPDMatrix",
    "ShapeMismatch",
    "TrajectoryBatch",
    "ar1_covariance",
    "cholesky",
    "classify",
    "cm_oracle",
    "condition",
    "construct_model",
    "destination_model",
    "extract_residuals",
    "generate_ensemble",
    "implied_covariance",
    "invert_spd",
    "markov_oracle",
    "pattern_check",
    "random_cm_instance",
    "random_model",
    "random_spd_covariance",
    "reciprocal_oracle",
    "sample_mvn",
    "simulate",
    "__version__",
]
