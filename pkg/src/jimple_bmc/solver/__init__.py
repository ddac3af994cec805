"""Bit-vector formula representation, SMT-LIB2 emission, and solving."""

from . import terms
from .brute import BruteForceLimitError, brute_force
from .formula import Formula, Model, complete_model, default_value
from .process import (
    SolverCommand,
    SolverConfigError,
    SolverOutputError,
    SolverResult,
    resolve_solver,
    solve,
)
from .smtlib import emit_smtlib2

__all__ = [
    "terms",
    "BruteForceLimitError",
    "brute_force",
    "Formula",
    "Model",
    "complete_model",
    "default_value",
    "SolverCommand",
    "SolverConfigError",
    "SolverOutputError",
    "SolverResult",
    "resolve_solver",
    "solve",
    "emit_smtlib2",
]
