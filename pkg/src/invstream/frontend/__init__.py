"""Parsers for the native and Lustre formats, terms and transition systems."""

from invstream.frontend.lustre import (
    INIT_FLAG,
    LustreProgram,
    parse_expression,
    parse_lustre,
    translate,
)
from invstream.frontend.native import parse_formula, parse_native, print_native
from invstream.frontend.system import (
    TransitionSystem,
    collect_constants,
    make_system,
    state_vars,
)
from invstream.frontend.terms import (
    CUR,
    PRIMED,
    App,
    Const,
    Sort,
    Term,
    Var,
    Variable,
    substitute,
    typecheck,
)

__all__ = [
    "CUR", "PRIMED", "INIT_FLAG", "App", "Const", "LustreProgram", "Sort", "Term",
    "TransitionSystem", "Var", "Variable", "collect_constants", "make_system",
    "parse_expression", "parse_formula", "parse_lustre", "parse_native",
    "print_native", "state_vars", "substitute", "translate", "typecheck",
]
