"""Bounded model enumeration by exact evaluation.

The search assigns variables one at a time. A top-level conjunct of the form
``v = e`` (or a Bool literal) whose right side only mentions already assigned
variables fixes ``v`` directly instead of branching over its range, which keeps
transition relations written as ``x' = ...`` cheap to enumerate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from invstream.errors import EnumerationError, ParseError
from invstream.frontend.terms import App, Const, Sort, Term, Var, free_vars, top_conjuncts
from invstream.solver.evaluator import compile_term, normalize

DEFAULT_CAP = 1_000_000

_RANGE = re.compile(r"^\s*([A-Za-z_][\w']*)\s*=\s*(-?[\d/]+)\s*\.\.\s*(-?[\d/]+)\s*(?::\s*([\d/]+))?\s*$")


@dataclass(frozen=True)
class BoundsSpec:
    """Finite value ranges per variable name (applied to every epoch).

    Int ranges are inclusive integer intervals; Real ranges are listed grids.
    Bool variables always range over ``(False, True)``.
    """

    ranges: Mapping[str, tuple] = field(default_factory=dict)

    @classmethod
    def parse(cls, text: str, variables=None) -> "BoundsSpec":
        """Parse ``"x=-1..5,y=0..3,r=0..2:1/2"``; a ``:step`` makes a Real grid."""
        sorts = {v.name: v.sort for v in variables} if variables is not None else {}
        ranges = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            m = _RANGE.match(part)
            if not m:
                raise ParseError(f"bad bounds entry {part!r} (expected name=lo..hi[:step])")
            name, lo, hi, step = m.groups()
            if name in ranges:
                raise ParseError(f"bounds given twice for {name}")
            sort = sorts.get(name)
            if variables is not None and sort is None:
                raise ParseError(f"bounds for unknown variable {name}")
            if sort is Sort.BOOL:
                raise ParseError(f"{name} is Bool; Bool ranges are implicit")
            try:
                lo_v, hi_v = Fraction(lo), Fraction(hi)
                step_v = Fraction(step) if step else None
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad number in bounds entry {part!r}") from None
            if lo_v > hi_v:
                raise ParseError(f"empty range for {name}")
            if step_v is not None and step_v <= 0:
                raise ParseError(f"non-positive step for {name}")
            if sort is Sort.REAL or step_v is not None:
                if sort is Sort.INT:
                    raise ParseError(f"{name} is Int; grids apply to Real variables")
                step_v = step_v or Fraction(1)
                n = int((hi_v - lo_v) / step_v)
                ranges[name] = tuple(lo_v + i * step_v for i in range(n + 1))
            else:
                if lo_v.denominator != 1 or hi_v.denominator != 1:
                    raise ParseError(f"Int range for {name} needs integer endpoints")
                ranges[name] = (int(lo_v), int(hi_v))
        return cls(ranges)

    @classmethod
    def of(cls, **ranges) -> "BoundsSpec":
        """``BoundsSpec.of(x=(0, 5), r=[0, Fraction(1, 2)])``: tuples of two ints are intervals."""
        out = {}
        for name, r in ranges.items():
            if isinstance(r, tuple) and len(r) == 2 and all(type(e) is int for e in r):
                out[name] = r
            else:
                out[name] = tuple(Fraction(e) for e in r)
        return cls(out)

    def is_grid(self, name) -> bool:
        r = self.ranges.get(name, ())
        return not (len(r) == 2 and all(type(e) is int for e in r))

    def values(self, name: str, sort: Sort, halo: bool = False) -> tuple:
        """Candidate values; ``halo`` adds one Int value past each end."""
        if sort is Sort.BOOL:
            return (False, True)
        if name not in self.ranges:
            raise EnumerationError(f"no bounds for numeric variable {name}")
        r = self.ranges[name]
        if self.is_grid(name):
            return r
        lo, hi = r
        if halo:
            return tuple(range(lo - 1, hi + 2))
        return tuple(range(lo, hi + 1))

    def contains(self, name: str, value, sort: Sort) -> bool:
        if sort is Sort.BOOL:
            return True
        if name not in self.ranges:
            return True
        r = self.ranges[name]
        if self.is_grid(name):
            return Fraction(value) in r
        return r[0] <= value <= r[1]

    def size(self, variables) -> int:
        n = 1
        for v in variables:
            n *= len(self.values(v.name, v.sort))
        return n

    def render(self) -> str:
        parts = []
        for name, r in self.ranges.items():
            if self.is_grid(name):
                step = r[1] - r[0] if len(r) > 1 else Fraction(1)
                parts.append(f"{name}={_q(r[0])}..{_q(r[-1])}:{_q(step)}")
            else:
                parts.append(f"{name}={r[0]}..{r[1]}")
        return ",".join(parts)


def _q(f):
    f = Fraction(f)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


@dataclass
class ModelSearch:
    """Outcome of a bounded search; ``escaped`` flags models seen outside the bounds."""

    states: list
    escaped: bool = False
    nodes: int = 0


def _definition(c: Term, wanted_keys):
    """``(key, expr)`` when conjunct ``c`` pins one wanted variable."""
    if isinstance(c, Var) and c.sort is Sort.BOOL and c.key in wanted_keys:
        return c.key, Const(True, Sort.BOOL)
    if isinstance(c, App):
        if c.op == "not" and isinstance(c.args[0], Var) and c.args[0].key in wanted_keys:
            return c.args[0].key, Const(False, Sort.BOOL)
        if c.op == "=":
            for lhs, rhs in (c.args, c.args[::-1]):
                if isinstance(lhs, Var) and lhs.key in wanted_keys:
                    if lhs.key not in {v.key for v in free_vars(rhs)}:
                        return lhs.key, rhs
    return None


def _plan(f: Term, wanted: Sequence[Var], fixed_keys, bounded=frozenset()):
    keys = [v.key for v in wanted]
    sorts = {v.key: v.sort for v in wanted}
    wanted_keys = set(keys)
    conjs = top_conjuncts(f)
    cvars = []
    for c in conjs:
        vs = {v.key for v in free_vars(c)}
        missing = vs - wanted_keys - fixed_keys
        if missing:
            name, epoch = sorted(missing, key=str)[0]
            raise EnumerationError(f"variable {name} ({epoch}) is neither enumerated nor fixed")
        cvars.append(vs & wanted_keys)
    defs = {}
    for c, vs in zip(conjs, cvars):
        d = _definition(c, wanted_keys)
        if d is not None and d[0] not in defs:
            deps = {v.key for v in free_vars(d[1])} & wanted_keys
            defs[d[0]] = (d[1], deps)
    assigned = set()
    steps = []
    checked = [False] * len(conjs)

    def ready_checks():
        out = []
        for i, vs in enumerate(cvars):
            if not checked[i] and vs <= assigned:
                checked[i] = True
                out.append(compile_term(conjs[i]))
        return out

    pre_checks = ready_checks()
    remaining = list(keys)
    while remaining:
        pick = None
        for k in remaining:
            d = defs.get(k)
            if d is not None and d[1] <= assigned:
                pick = (k, compile_term(d[0]))
                break
        if pick is None:
            # branch on a variable nothing else can determine, else a bounded one
            free = [k for k in remaining if k not in defs]
            fallback = [k for k in remaining if k[0] in bounded or sorts[k] is Sort.BOOL]
            pick = ((free or fallback or remaining)[0], None)
        remaining.remove(pick[0])
        assigned.add(pick[0])
        steps.append((pick[0], pick[1], ready_checks()))
    return steps, pre_checks


def search_models(
    f: Term,
    wanted: Sequence[Var],
    bounds: BoundsSpec,
    cap: int = DEFAULT_CAP,
    fixed: Mapping | None = None,
    detect_escape: bool = False,
) -> ModelSearch:
    """Enumerate assignments to ``wanted`` within ``bounds`` that satisfy ``f``.

    ``fixed`` supplies values for other variables of ``f``. With
    ``detect_escape``, Int variables are also tried one step outside their
    range and functionally computed values outside the bounds are noted; such
    models are excluded from the result but set ``escaped``.
    """
    wanted = list(wanted)
    if len({v.key for v in wanted}) != len(wanted):
        raise EnumerationError("duplicate variable in enumeration order")
    env = dict(fixed or {})
    steps, pre_checks = _plan(f, wanted, set(env), set(bounds.ranges))
    sorts = {v.key: v.sort for v in wanted}
    result = ModelSearch([])
    if not all(c(env) for c in pre_checks):
        return result
    domains = []
    for key, expr, _ in steps:
        name, sort = key[0], sorts[key]
        if expr is None:
            halo = detect_escape and sort is Sort.INT and not bounds.is_grid(name)
            domains.append(bounds.values(name, sort, halo=halo))
        else:
            domains.append(None)
    n = len(steps)

    def rec(i, outside):
        result.nodes += 1
        if i == n:
            if outside:
                result.escaped = True
                return
            result.states.append(tuple(env[v.key] for v in wanted))
            if len(result.states) > cap:
                raise EnumerationError(f"more than {cap} models")
            return
        key, expr, checks = steps[i]
        name, sort = key[0], sorts[key]
        if expr is None:
            candidates = domains[i]
        else:
            try:
                candidates = (normalize(expr(env), sort),)
            except TypeError:
                return  # Real value for an Int variable: no model on this branch
        for val in candidates:
            env[key] = val
            if all(c(env) for c in checks):
                out = outside or not bounds.contains(name, val, sort)
                if out and not detect_escape:
                    continue
                rec(i + 1, out)
        env.pop(key, None)

    rec(0, False)
    result.states.sort()
    return result


def enumerate_models(
    f: Term,
    wanted: Sequence[Var],
    bounds: BoundsSpec,
    cap: int = DEFAULT_CAP,
    fixed: Mapping | None = None,
) -> list:
    """All states over ``wanted`` within ``bounds`` satisfying ``f``, sorted lexicographically."""
    return search_models(f, wanted, bounds, cap=cap, fixed=fixed).states
