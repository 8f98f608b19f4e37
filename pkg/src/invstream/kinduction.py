"""k-induction over the (init, trans) encoding, with optional strengthening."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from invstream.errors import SolverError
from invstream.frontend.system import TransitionSystem
from invstream.frontend.terms import CUR, TRUE, Term, at_step, conj, neg, render, retime, size
from invstream.solver.evaluator import holds

log = logging.getLogger(__name__)

UNKNOWN = "unknown"
CONFIRMED = "confirmed"
FALSIFIED = "falsified"


@dataclass(frozen=True)
class Candidate:
    """A candidate invariant and what is known about it.

    ``trace`` (for falsified candidates) lists full states from an initial state
    to one violating the formula. ``note`` says why an unknown candidate stayed
    unknown: ``"inconclusive"`` for a step counterexample, or a solver reason.
    """

    formula: Term
    status: str = UNKNOWN
    k: int | None = None
    depth: int | None = None
    trace: tuple | None = None
    note: str | None = None

    @property
    def confirmed(self):
        return self.status == CONFIRMED

    @property
    def falsified(self):
        return self.status == FALSIFIED

    def __str__(self):
        return f"{render(self.formula)} [{self.status}]"


@dataclass
class UnrollContext:
    ts: TransitionSystem
    k: int
    copies: list = field(default_factory=list)
    steps: list = field(default_factory=list)

    @property
    def path(self) -> Term:
        return conj(*self.steps)

    def prefix(self, j) -> Term:
        """Transitions up to copy ``j``."""
        return conj(*self.steps[:j])

    def at(self, t: Term, i: int) -> Term:
        return retime(t, {CUR: i})


def unroll(ts: TransitionSystem, k: int) -> UnrollContext:
    if k < 1:
        raise ValueError("unrolling depth must be at least 1")
    ctx = UnrollContext(ts, k)
    ctx.copies = [ts.at(i) for i in range(k + 1)]
    ctx.steps = [at_step(ts.trans, i) for i in range(k)]
    return ctx


@dataclass(frozen=True)
class BaseResult:
    holds: bool
    depth: int | None = None
    trace: tuple | None = None
    unknown: str | None = None


@dataclass(frozen=True)
class StepResult:
    holds: bool
    states: tuple | None = None
    unknown: str | None = None


def _trace(ctx, model, j):
    return tuple(tuple(model[v] for v in ctx.copies[i]) for i in range(j + 1))


def check_base(P: Term, ts: TransitionSystem, k: int, s, ctx: UnrollContext | None = None) -> BaseResult:
    """``P`` holds on every state reachable in fewer than ``k`` steps."""
    ctx = ctx or unroll(ts, k)
    for j in range(k):
        f = conj(ctx.at(ts.init, 0), ctx.prefix(j), neg(ctx.at(P, j)))
        wanted = [v for i in range(j + 1) for v in ctx.copies[i]]
        res = s.check_sat_with_model(f, wanted)
        if res.is_unknown:
            return BaseResult(False, unknown=res.reason or "unknown")
        if res.is_sat:
            return BaseResult(False, depth=j, trace=_trace(ctx, res.model, j))
    return BaseResult(True)


def check_step(P: Term, ts: TransitionSystem, k: int, In: Term, s, ctx: UnrollContext | None = None) -> StepResult:
    """``P`` at ``k`` consecutive states (and ``In`` everywhere) forces ``P`` next."""
    ctx = ctx or unroll(ts, k)
    parts = [ctx.path]
    parts += [ctx.at(In, i) for i in range(k + 1)]
    parts += [ctx.at(P, i) for i in range(k)]
    parts.append(neg(ctx.at(P, k)))
    wanted = [v for c in ctx.copies for v in c]
    res = s.check_sat_with_model(conj(*parts), wanted)
    if res.is_unknown:
        return StepResult(False, unknown=res.reason or "unknown")
    if res.is_sat:
        return StepResult(False, states=_trace(ctx, res.model, k))
    return StepResult(True)


def _batch_base(pending, results, ts, k, s, ctx):
    """Base checks for many candidates at once.

    At each depth one query asks for a path violating any pending candidate;
    every candidate the returned trace violates is falsified with that trace,
    and the query repeats until Unsat. The least failing depth is found for
    each candidate, as with :func:`check_base`.
    """
    if not pending:
        return pending
    if not _alive(s):
        for i, cand in pending:
            results[i] = replace(cand, note="solver unavailable")
        return []
    s.push()
    try:
        s.add(ctx.at(ts.init, 0))
        for j in range(k):
            if j > 0:
                s.add(ctx.steps[j - 1])
            wanted = [v for i in range(j + 1) for v in ctx.copies[i]]
            while pending:
                bad = neg(conj(*(ctx.at(c.formula, j) for _, c in pending)))
                res = s.check_sat_with_model(bad, wanted)
                if res.is_unsat:
                    break
                if res.is_unknown:
                    for i, cand in pending:
                        results[i] = replace(cand, note=res.reason or "unknown")
                    return []
                env = {v.key: x for v, x in res.model.items()}
                trace = _trace(ctx, res.model, j)
                keep = []
                for i, cand in pending:
                    if holds(ctx.at(cand.formula, j), env):
                        keep.append((i, cand))
                    else:
                        log.debug("falsified %s at depth %d", render(cand.formula), j)
                        results[i] = replace(cand, status=FALSIFIED, depth=j, trace=trace, note=None)
                if len(keep) == len(pending):
                    raise SolverError("base model violates none of the queried candidates")
                pending = keep
    finally:
        if _alive(s):
            s.pop()
    return pending


def _alive(s):
    return getattr(s, "alive", True)


def ordered(cands) -> list:
    """Smallest formulas first, ties broken by text."""
    return sorted(cands, key=lambda c: (size(c.formula), render(c.formula)))


def confirm(cands, ts: TransitionSystem, k: int, In: Term = TRUE, s=None, on_confirm=None) -> list:
    """Run base and step checks on every unknown candidate.

    Base checks run first, batched per depth. Step checks then share one asserted unrolling (the
    path and ``In`` at every copy); each candidate only adds its own part in a
    nested scope. Candidates confirmed earlier in the batch are asserted too,
    strengthening later step checks. Results come back smallest formula first;
    ``on_confirm`` is called with each newly confirmed candidate.
    """
    if s is None:
        raise ValueError("confirm needs a solver session")
    ctx = unroll(ts, k)
    results = {}
    pending = []
    for i, cand in enumerate(ordered(cands)):
        if cand.status != UNKNOWN:
            results[i] = cand
        else:
            pending.append((i, cand))
    pending = _batch_base(pending, results, ts, k, s, ctx)
    if pending:
        wanted = [v for c in ctx.copies for v in c]
        s.push()
        try:
            s.add(ctx.path)
            for j in range(k + 1):
                s.add(ctx.at(In, j))
            for i, cand in pending:
                if not _alive(s):
                    results[i] = replace(cand, note="solver unavailable")
                    continue
                P = cand.formula
                query = conj(*[ctx.at(P, j) for j in range(k)], neg(ctx.at(P, k)))
                res = s.check_sat_with_model(query, wanted)
                if res.is_unknown:
                    results[i] = replace(cand, note=res.reason or "unknown")
                elif res.is_sat:
                    results[i] = replace(cand, note="inconclusive")
                else:
                    done = replace(cand, status=CONFIRMED, k=k, note=None)
                    results[i] = done
                    for j in range(k + 1):
                        s.add(ctx.at(P, j))
                    if on_confirm is not None:
                        on_confirm(done)
        finally:
            if _alive(s):
                s.pop()
    return [results[i] for i in sorted(results)]
