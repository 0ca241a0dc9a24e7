"""Exact and averaged twisted first moments of level-1 cusp form L-values."""

from .errors import (
    ConvergenceError,
    CuspMomentError,
    DomainError,
    PoleError,
    TruncationError,
)
from .exact_formula import (
    CENTRAL,
    DEFAULT_TRUNCATION,
    MomentResult,
    ShiftParams,
    TruncationParams,
    WeightParam,
    twisted_moment_exact,
    v1_error_series,
)
from .weight_average import AverageResult, TestFunction, averaged_moment, make_bump

__all__ = [
    "CENTRAL",
    "DEFAULT_TRUNCATION",
    "AverageResult",
    "ConvergenceError",
    "CuspMomentError",
    "DomainError",
    "MomentResult",
    "PoleError",
    "ShiftParams",
    "TestFunction",
    "TruncationError",
    "TruncationParams",
    "WeightParam",
    "averaged_moment",
    "make_bump",
    "twisted_moment_exact",
    "v1_error_series",
]
