from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from invstream.errors import DuplicateVariableError, SortError, UnboundVariableError
from invstream.frontend.terms import (
    CUR,
    PRIMED,
    Sort,
    Term,
    Var,
    Variable,
    constants,
    free_vars,
    typecheck,
)


@dataclass(frozen=True)
class TransitionSystem:
    """A pair of formulas ``(init, trans)`` over an ordered variable tuple.

    ``init`` mentions current-epoch variables only; ``trans`` relates the
    current and primed copies.
    """

    vars: tuple
    init: Term
    trans: Term
    constants: frozenset = field(default=frozenset())

    def var(self, name: str) -> Variable:
        for v in self.vars:
            if v.name == name:
                return v
        raise KeyError(name)

    def at(self, epoch=CUR) -> tuple:
        return tuple(v.at(epoch) for v in self.vars)

    @property
    def names(self) -> tuple:
        return tuple(v.name for v in self.vars)


def make_system(variables: Sequence[Variable], init: Term, trans: Term) -> TransitionSystem:
    """Validate and build a system, computing its constant set."""
    seen = set()
    for v in variables:
        if v.name in seen:
            raise DuplicateVariableError(f"duplicate variable {v.name!r}")
        seen.add(v.name)
    variables = tuple(variables)
    _check_formula(init, variables, (CUR,), "init")
    _check_formula(trans, variables, (CUR, PRIMED), "trans")
    consts = frozenset(constants(init) | constants(trans))
    return TransitionSystem(variables, init, trans, consts)


def _check_formula(t: Term, variables, epochs, what):
    if typecheck(t, variables) is not Sort.BOOL:
        raise SortError(f"{what} is not a Bool formula", t)
    for v in free_vars(t):
        if v.epoch not in epochs:
            raise UnboundVariableError(f"{what} may not mention", v)


def collect_constants(ts: TransitionSystem) -> frozenset:
    """Numeric constants of ``ts`` closed under negation, plus zero."""
    out = {Fraction(0)}
    for c in ts.constants:
        out.add(Fraction(c))
        out.add(-Fraction(c))
    return frozenset(out)


def state_vars(ts: TransitionSystem, epoch=CUR) -> tuple:
    return tuple(Var(v.name, v.sort, epoch) for v in ts.vars)
