"""Solver sessions, exact evaluation and bounded model enumeration."""

from invstream.solver.deterministic import DeterministicSession
from invstream.solver.enumerate import BoundsSpec, enumerate_models, search_models
from invstream.solver.evaluator import compile_term, eval_term, holds, normalize
from invstream.solver.session import (
    SatResult,
    Session,
    SolverConfig,
    check_sat_with_model,
    open_session,
)
from invstream.solver.smtlib import emit_formula, parse_value

__all__ = [
    "BoundsSpec", "DeterministicSession", "SatResult", "Session", "SolverConfig",
    "check_sat_with_model", "compile_term", "emit_formula", "enumerate_models",
    "eval_term", "holds", "normalize", "open_session", "parse_value", "search_models",
]
