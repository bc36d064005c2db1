"""Pydantic schemas for disco."""

from .bias import Bias, PredicateDecl
from .property import ConstraintRecord, MinerConfig, PropertyRecord
from .report import ExitCode, RunReport

__all__ = [
    "Bias",
    "ConstraintRecord",
    "ExitCode",
    "MinerConfig",
    "PredicateDecl",
    "PropertyRecord",
    "RunReport",
]
