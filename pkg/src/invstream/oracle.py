"""Ground truth at desk scale: explicit reachability, invariant checks and a
reference Lustre interpreter that works on streams directly."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from invstream.errors import EnumerationError, InvStreamError
from invstream.frontend.lustre import Arrow, LustreProgram, Pre
from invstream.frontend.system import TransitionSystem
from invstream.frontend.terms import (
    CUR,
    PRIMED,
    TRUE,
    App,
    Const,
    Term,
    Var,
    conj,
    const,
    disj,
    free_vars,
    le,
    neg,
    render_value,
)
from invstream.solver.enumerate import DEFAULT_CAP, BoundsSpec, search_models
from invstream.solver.evaluator import compile_term, normalize

_HEADER = re.compile(r"oracle-bounds:\s*(.*)$", re.MULTILINE)


def bounds_from_source(text: str, variables=None) -> BoundsSpec | None:
    """Bounds from an ``oracle-bounds:`` comment line; ``None`` when absent or ``none``."""
    m = _HEADER.search(text)
    if not m:
        return None
    spec = m.group(1).strip()
    if spec.startswith("none"):
        return None
    spec = spec.rstrip("*)").strip()
    return BoundsSpec.parse(spec, variables)


@dataclass
class ReachResult:
    variables: tuple
    states: list
    complete: bool
    reason: str | None = None
    depth: int = 0
    transitions: int = 0
    frontier: list = field(default_factory=list)  # states discovered per BFS layer

    def __contains__(self, state):
        return tuple(state) in self._index

    @property
    def _index(self):
        idx = getattr(self, "_set", None)
        if idx is None or len(idx) != len(self.states):
            idx = set(self.states)
            self._set = idx
        return idx

    def env(self, state) -> dict:
        return {(v.name, CUR): x for v, x in zip(self.variables, state)}


def _pin(v, epoch, x):
    return App("=", (Var(v.name, v.sort, epoch), const(x, v.sort)))


def _range_constraint(v: Var, bounds: BoundsSpec):
    r = bounds.ranges.get(v.name)
    if r is None or not v.sort.is_numeric:
        return TRUE
    if bounds.is_grid(v.name):
        return disj(*(App("=", (v, const(x, v.sort))) for x in r))
    return conj(le(const(r[0], v.sort), v), le(v, const(r[1], v.sort)))


def solver_models(session):
    """Model enumerator over an external solver: each model found is blocked by
    the negation of its assignment formula and the query repeats until Unsat."""

    def models(f, wanted, bounds, cap, fixed=None):
        sorts = {v.key: v.sort for v in free_vars(f)}
        parts = [f]
        for (name, epoch), x in (fixed or {}).items():
            if (name, epoch) in sorts:
                parts.append(_pin(Var(name, sorts[(name, epoch)], epoch), epoch, x))
        parts += [_range_constraint(v, bounds) for v in wanted]
        found = []
        while True:
            res = session.check_sat_with_model(conj(*parts), wanted)
            if res.is_unknown:
                raise EnumerationError(f"solver unknown while enumerating: {res.reason}")
            if res.is_unsat:
                break
            state = res.state(wanted)
            found.append(state)
            if len(found) > cap:
                raise EnumerationError(f"more than {cap} models")
            parts.append(neg(conj(*(App("=", (v, const(x, v.sort))) for v, x in zip(wanted, state)))))
        found.sort()
        return found, False

    return models


def _bounded_models(f, wanted, bounds, cap, fixed=None):
    r = search_models(f, wanted, bounds, cap=cap, fixed=fixed, detect_escape=True)
    return r.states, r.escaped


def enumerate_reachable(
    ts: TransitionSystem,
    bounds: BoundsSpec,
    cap: int = 200_000,
    models=None,
) -> ReachResult:
    """Breadth-first closure of the initial states under bounded successors.

    ``models(f, wanted, bounds, cap, fixed)`` returns ``(states, escaped)``; the
    default enumerates by evaluation, :func:`solver_models` uses a solver.
    """
    models = models or _bounded_models
    cur, nxt = ts.at(CUR), ts.at(PRIMED)
    result = ReachResult(ts.vars, [], True)
    try:
        seeds, escaped = models(ts.init, cur, bounds, DEFAULT_CAP)
    except EnumerationError as e:
        result.complete, result.reason = False, f"initial states: {e}"
        return result
    if escaped:
        result.complete, result.reason = False, "an initial state lies outside the bounds"
    seen = set()
    queue = deque()
    for s in seeds:
        if s not in seen:
            seen.add(s)
            queue.append((s, 0))
    layer_sizes = {0: len(seen)} if seen else {}
    while queue:
        state, d = queue.popleft()
        fixed = {(v.name, CUR): x for v, x in zip(ts.vars, state)}
        try:
            succs, escaped = models(ts.trans, nxt, bounds, DEFAULT_CAP, fixed)
        except EnumerationError as e:
            result.complete, result.reason = False, f"successors: {e}"
            break
        if escaped and result.complete:
            result.complete, result.reason = False, "a successor lies outside the bounds"
        result.transitions += len(succs)
        for s in succs:
            if s not in seen:
                if len(seen) >= cap:
                    result.complete, result.reason = False, f"state cap {cap} reached"
                    queue.clear()
                    break
                seen.add(s)
                queue.append((s, d + 1))
                layer_sizes[d + 1] = layer_sizes.get(d + 1, 0) + 1
                result.depth = max(result.depth, d + 1)
    result.states = sorted(seen)
    result.frontier = [layer_sizes[i] for i in sorted(layer_sizes)]
    return result


@dataclass(frozen=True)
class InvariantCheck:
    holds: bool
    violation: tuple | None = None
    advisory: bool = False  # the reachable set was incomplete

    def __bool__(self):
        return self.holds


def check_invariant(P: Term, r: ReachResult) -> InvariantCheck:
    f = compile_term(P)
    for state in r.states:
        if f(r.env(state)) is not True:
            return InvariantCheck(False, state, not r.complete)
    return InvariantCheck(True, None, not r.complete)


def violations(P: Term, r: ReachResult) -> list:
    f = compile_term(P)
    return [s for s in r.states if f(r.env(s)) is not True]


def write_states(path, r: ReachResult):
    """One line per state, ``name=value`` pairs in variable order."""
    with open(path, "w") as fh:
        fh.write(f"# {len(r.states)} states, complete={str(r.complete).lower()}\n")
        for s in r.states:
            fh.write(" ".join(f"{v.name}={render_value(x, v.sort)}" for v, x in zip(r.variables, s)) + "\n")


# -- reference Lustre interpreter --------------------------------------------------------


def simulate_lustre(prog: LustreProgram, inputs: Sequence[Mapping]) -> list:
    """Stream values instant by instant; returns one dict per instant over all streams."""
    if not inputs:
        raise InvStreamError("input trace must be nonempty")
    sorts = {v.name: v.sort for v in prog.streams}
    trace = []
    for t, given in enumerate(inputs):
        row = {}
        for v in prog.inputs:
            if v.name not in given:
                raise InvStreamError(f"input {v.name} missing at instant {t}")
            row[v.name] = normalize(given[v.name], v.sort)
        trace.append(row)

    def value(name, t):
        row = trace[t]
        if name not in row:
            row[name] = None  # cycle guard, acyclicity is checked at parse time
            row[name] = normalize(ev(prog.equations[name], t), sorts[name])
        return row[name]

    def ev(e, t):
        if isinstance(e, Const):
            return e.value
        if isinstance(e, Var):
            return value(e.name, t)
        if isinstance(e, Arrow):
            return ev(e.first, t) if t == 0 else ev(e.rest, t)
        if isinstance(e, Pre):
            if t == 0:
                raise InvStreamError(f"pre read at the first instant: {e}")
            return ev(e.operand, t - 1)
        if isinstance(e, App):
            op = e.op
            if op == "ite":
                return ev(e.args[1], t) if ev(e.args[0], t) else ev(e.args[2], t)
            if op == "and":
                return all(ev(a, t) for a in e.args)
            if op == "or":
                return any(ev(a, t) for a in e.args)
            if op == "=>":
                return (not ev(e.args[0], t)) or ev(e.args[1], t)
            vals = [ev(a, t) for a in e.args]
            return _APPLY[op](*vals)
        raise InvStreamError(f"cannot interpret {e!r}")

    for t in range(len(trace)):
        for v in prog.outputs + prog.locals:
            value(v.name, t)
    return [dict(row) for row in trace]


_APPLY = {
    "not": lambda a: not a,
    "=": lambda a, b: a == b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
    "+": lambda *xs: sum(xs),
    "-": lambda a, b: a - b,
    "neg": lambda a: -a,
    "*": lambda a, b: a * b,
}


def system_trace(ts: TransitionSystem, inputs: Sequence[Mapping]) -> list:
    """Run a translated system on an input trace by pinning each step through
    evaluation: the state at each instant must be the unique model of ``init``
    (then ``trans``) given the inputs."""
    input_vars = [v for v in ts.vars if v.kind == "input"]
    cur, nxt = ts.at(CUR), ts.at(PRIMED)
    empty = BoundsSpec()
    out = []
    prev = None
    for t, given in enumerate(inputs):
        if t == 0:
            fixed_in = {(v.name, CUR): normalize(given[v.name], v.sort) for v in input_vars}
            f = conj(ts.init, *(_pin(v, CUR, x) for v in input_vars for x in [fixed_in[(v.name, CUR)]]))
            states = search_models(f, cur, empty).states
        else:
            fixed = {(v.name, CUR): x for v, x in zip(ts.vars, prev)}
            pins = [_pin(v, PRIMED, normalize(given[v.name], v.sort)) for v in input_vars]
            states = search_models(conj(ts.trans, *pins), nxt, empty, fixed=fixed).states
        if len(states) != 1:
            raise InvStreamError(f"instant {t}: expected exactly one state, found {len(states)}")
        prev = states[0]
        out.append({v.name: x for v, x in zip(ts.vars, prev)})
    return out

