"""The variable tuple an abstract domain ranges over."""

from __future__ import annotations

from dataclasses import dataclass, field

from invstream.frontend.terms import CUR, Sort, Var, Variable


@dataclass(frozen=True)
class Space:
    variables: tuple
    numeric: tuple = field(init=False, compare=False, repr=False)
    bools: tuple = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        vs = tuple(self.variables)
        names = [v.name for v in vs]
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable in space")
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "numeric", tuple(v for v in vs if v.sort.is_numeric))
        object.__setattr__(self, "bools", tuple(v for v in vs if v.sort is Sort.BOOL))

    @classmethod
    def of(cls, ts_or_vars) -> "Space":
        vs = getattr(ts_or_vars, "vars", ts_or_vars)
        return cls(tuple(vs))

    def term(self, v: Variable) -> Var:
        return Var(v.name, v.sort, CUR)

    def env(self, state) -> dict:
        if len(state) != len(self.variables):
            raise ValueError(f"state has {len(state)} values, space has {len(self.variables)} variables")
        return {(v.name, CUR): val for v, val in zip(self.variables, state)}

    def split(self, state):
        """Numeric and Bool components of a full state."""
        num, bools = [], []
        for v, val in zip(self.variables, state):
            (num if v.sort.is_numeric else bools).append(val)
        return tuple(num), tuple(bools)
