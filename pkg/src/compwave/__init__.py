"""Composite rarefaction/contact waves for a viscoelastic p-system with a
non-convex stress law: wave construction, interaction curves, a finite
difference solver and stability diagnostics."""

from .errors import (
    BlowUpError,
    BracketError,
    ClassificationError,
    CompwaveError,
    ConfigError,
    DomainError,
    OrderingError,
    VerificationFailure,
)
from .riemann import CaseLabel, FarFieldData, build_case1, classify
from .stress import StressModel
from .waves import WaveAnsatz

__all__ = [
    "BlowUpError",
    "BracketError",
    "CaseLabel",
    "ClassificationError",
    "CompwaveError",
    "ConfigError",
    "DomainError",
    "FarFieldData",
    "OrderingError",
    "StressModel",
    "VerificationFailure",
    "WaveAnsatz",
    "build_case1",
    "classify",
]

__version__ = "0.1.0"
