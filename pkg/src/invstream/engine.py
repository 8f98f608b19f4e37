"""The solver-driven fixpoint loop and its stream of events.

Each step asks the solver for a transition from a state inside the current
element to one outside it. Unsat means the element is a post-fixpoint; a model
gives a new state whose abstraction is joined (or, after a delay, widened)
into the element. Between steps the conjuncts of the element are handed to
k-induction, and whatever it confirms strengthens later steps.
"""

from __future__ import annotations

import logging
import queue
import threading
import time
from collections import Counter
from dataclasses import dataclass, field

from invstream.errors import SolverError
from invstream.frontend.system import TransitionSystem, collect_constants
from invstream.frontend.terms import CUR, PRIMED, TRUE, Term, conj, neg, prime, render
from invstream.kinduction import CONFIRMED, FALSIFIED, Candidate, confirm
from invstream.solver.evaluator import holds

log = logging.getLogger(__name__)


@dataclass
class EngineConfig:
    widen_delay: int = 4
    thresholds: frozenset | None = None  # None means collect_constants(ts)
    max_iters: int = 10000
    strengthen_current: bool = False
    cadence: int = 1
    k: int = 2
    confirm: bool = True
    strengthen: bool = True  # use confirmed invariants in steps (In)
    targets: tuple = ()
    targets_use_invariants: bool = True
    async_confirm: bool = False
    check_models: bool = False

    def __post_init__(self):
        if self.widen_delay < 0:
            raise ValueError("widen delay must be nonnegative")
        for name in ("max_iters", "cadence", "k"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


# -- events ---------------------------------------------------------------------


@dataclass(frozen=True)
class InitAbstraction:
    element: object
    iterations: int = 0
    name = "init"


@dataclass(frozen=True)
class StateInjected:
    iteration: int
    state: tuple
    element: object
    name = "state"


@dataclass(frozen=True)
class Candidates:
    iteration: int
    formulas: tuple
    name = "candidates"


@dataclass(frozen=True)
class InvariantConfirmed:
    iteration: int
    formula: Term
    k: int
    name = "invariant"


@dataclass(frozen=True)
class PostFixpoint:
    element: object
    iterations: int
    name = "postfix"


@dataclass(frozen=True)
class Aborted:
    reason: str
    element: object
    confirmed: tuple
    iterations: int = 0
    name = "abort"


@dataclass
class AnalysisResult:
    ts: TransitionSystem
    final: object | None = None
    element: object | None = None
    confirmed: list = field(default_factory=list)  # (formula, k)
    falsified: list = field(default_factory=list)  # Candidate
    events: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)
    aborted: str | None = None
    iterations: int = 0

    @property
    def reached_fixpoint(self):
        return self.final is not None

    def invariant(self, formula) -> bool:
        return any(f == formula for f, _ in self.confirmed)


class AbortAnalysis(Exception):
    def __init__(self, reason, element=None):
        super().__init__(reason)
        self.reason = reason
        self.element = element


@dataclass(frozen=True)
class Fixpoint:
    element: object


@dataclass(frozen=True)
class Progress:
    state: tuple
    element: object


# -- core operations --------------------------------------------------------------------


def thresholds_of(ts, cfg: EngineConfig):
    return collect_constants(ts) if cfg.thresholds is None else frozenset(cfg.thresholds)


def _extend(dom, a, state, iteration, cfg, thresholds):
    b = dom.join(a, dom.alpha(state))
    if iteration <= cfg.widen_delay:
        return b
    return dom.widen(a, b, thresholds)


def _calls(s):
    return getattr(s, "stats", Counter()).get("check", 0)


def compute_initial(ts: TransitionSystem, dom, cfg: EngineConfig, s, thresholds=None):
    """Over-approximate the initial states; returns ``(element, iterations)``."""
    thresholds = thresholds_of(ts, cfg) if thresholds is None else thresholds
    cur = ts.at(CUR)
    a = dom.bottom()
    it = 0
    while True:
        f = conj(ts.init, neg(dom.gamma(a)))
        res = s.check_sat_with_model(f, cur)
        if res.is_unsat:
            return a, it
        if res.is_unknown:
            raise AbortAnalysis(f"solver unknown in initial abstraction: {res.reason}", a)
        state = res.state(cur)
        if cfg.check_models:
            env = {v.key: x for v, x in zip(cur, state)}
            if not holds(f, env):
                raise SolverError("solver model violates the initial query")
        it += 1
        if it > cfg.max_iters:
            raise AbortAnalysis("iteration budget exhausted in initial abstraction", a)
        a = _extend(dom, a, state, it, cfg, thresholds)


def transformer_query(ts, dom, a, In: Term, cfg: EngineConfig) -> Term:
    g = dom.gamma(a)
    parts = [g, ts.trans, prime(In), neg(prime(g))]
    if cfg.strengthen_current:
        parts.append(In)
    return conj(*parts)


def step(a, ts: TransitionSystem, In: Term, cfg: EngineConfig, iteration: int, s, dom, thresholds=None):
    """One application of the transformer; ``iteration`` counts injections so far plus one."""
    thresholds = thresholds_of(ts, cfg) if thresholds is None else thresholds
    f = transformer_query(ts, dom, a, In, cfg)
    cur, nxt = ts.at(CUR), ts.at(PRIMED)
    res = s.check_sat_with_model(f, list(nxt) + list(cur))
    if res.is_unsat:
        return Fixpoint(a)
    if res.is_unknown:
        raise AbortAnalysis(f"solver unknown: {res.reason}", a)
    state = res.state(nxt)
    if cfg.check_models:
        env = {v.key: res.model[v] for v in list(cur) + list(nxt)}
        if not holds(f, env):
            raise SolverError("solver model violates the transformer query")
    return Progress(state, _extend(dom, a, state, iteration, cfg, thresholds))


# -- confirmation ---------------------------------------------------------------------------


class _Confirmer:
    """Candidate bookkeeping shared by the synchronous and threaded modes."""

    def __init__(self, ts, cfg):
        self.ts = ts
        self.cfg = cfg
        self.confirmed = []  # (formula, k) in confirmation order
        self.known = set()
        self.falsified = {}
        self.tried = {}  # formula -> number of invariants known when last inconclusive

    def In(self) -> Term:
        if not self.cfg.strengthen:
            return TRUE
        return conj(*(f for f, _ in self.confirmed))

    def fresh(self, formulas):
        out = []
        for f in formulas:
            if f in self.known or f in self.falsified or f == TRUE:
                continue
            if self.tried.get(f) == len(self.confirmed):
                continue
            out.append(f)
        return out

    def absorb(self, results, iteration, emit):
        for cand in results:
            f = cand.formula
            if cand.status == CONFIRMED and f not in self.known:
                self.known.add(f)
                self.confirmed.append((f, cand.k))
                emit(InvariantConfirmed(iteration, f, cand.k))
            elif cand.status == FALSIFIED:
                self.falsified[f] = cand
            elif cand.status != CONFIRMED:
                self.tried[f] = len(self.confirmed)

    def targets_open(self):
        return [t for t in self.cfg.targets if t not in self.known]


def _run_batch(ts, cfg, formulas, targets, In, s):
    """Regular candidates with ``In``; targets separately, with or without ``In``."""
    results = []
    if formulas:
        results += confirm([Candidate(f) for f in formulas], ts, cfg.k, In, s)
    if targets:
        t_in = In if cfg.targets_use_invariants else TRUE
        results += confirm([Candidate(f) for f in targets], ts, cfg.k, t_in, s)
    return results


class _Worker(threading.Thread):
    def __init__(self, ts, cfg, session):
        super().__init__(daemon=True)
        self.ts, self.cfg, self.session = ts, cfg, session
        self.jobs = queue.Queue()
        self.done = queue.Queue()
        self.busy = threading.Event()

    def run(self):
        while True:
            job = self.jobs.get()
            if job is None:
                return
            try:
                self.done.put(_run_batch(self.ts, self.cfg, *job, self.session))
            except Exception as e:  # surfaced by the loop
                self.done.put(e)
            finally:
                self.busy.clear()

    def submit(self, formulas, targets, In):
        self.busy.set()
        self.jobs.put((formulas, targets, In))

    def results(self, wait=False):
        out = []
        if wait:
            while self.busy.is_set() or not self.done.empty():
                try:
                    out.append(self.done.get(timeout=0.05))
                except queue.Empty:
                    continue
        while True:
            try:
                out.append(self.done.get_nowait())
            except queue.Empty:
                break
        for r in out:
            if isinstance(r, Exception):
                raise r
        return [c for batch in out for c in batch]

    def stop(self):
        self.jobs.put(None)
        self.join(timeout=5)


# -- the loop --------------------------------------------------------------------


def run(ts: TransitionSystem, dom, cfg: EngineConfig, sessions, sink=None) -> AnalysisResult:
    """Run the analysis; ``sessions`` is ``(engine, confirmer)`` or a single session.

    Events are delivered to ``sink`` as they happen and kept in the result.
    """
    if isinstance(sessions, (tuple, list)):
        engine_s, confirm_s = sessions
    else:
        engine_s = confirm_s = sessions
    thresholds = thresholds_of(ts, cfg)
    result = AnalysisResult(ts)
    tally = Counter()
    clock = {"start": time.monotonic()}

    def emit(ev):
        result.events.append(ev)
        if sink is not None:
            sink(ev)

    book = _Confirmer(ts, cfg)
    worker = None
    if cfg.confirm and cfg.async_confirm:
        worker = _Worker(ts, cfg, confirm_s)
        worker.start()

    def confirmation_round(a, iteration):
        formulas = book.fresh(dom.conjuncts(a)) if not dom.is_bottom(a) else []
        targets = [t for t in book.targets_open() if t not in formulas]
        if not formulas and not targets:
            return
        emit(Candidates(iteration, tuple(formulas + targets)))
        In = book.In()
        if worker is not None:
            if not worker.busy.is_set():
                worker.submit(formulas, targets, In)
            return
        t0 = time.monotonic()
        before = _calls(confirm_s)
        results = _run_batch(ts, cfg, formulas, targets, In, confirm_s)
        tally["confirm_calls"] += _calls(confirm_s) - before
        tally["confirm_time"] += time.monotonic() - t0
        book.absorb(results, iteration, emit)

    a = dom.bottom()
    it = 0
    try:
        t0 = time.monotonic()
        before = _calls(engine_s)
        a, n0 = compute_initial(ts, dom, cfg, engine_s, thresholds)
        tally["initial_calls"] += _calls(engine_s) - before
        tally["initial_time"] += time.monotonic() - t0
        tally["initial_iterations"] = n0
        emit(InitAbstraction(a, n0))
        while True:
            if worker is not None:
                book.absorb(worker.results(), it, emit)
            if cfg.confirm and it % cfg.cadence == 0:
                confirmation_round(a, it)
            t0 = time.monotonic()
            before = _calls(engine_s)
            r = step(a, ts, book.In(), cfg, it + 1, engine_s, dom, thresholds)
            tally["step_calls"] += _calls(engine_s) - before
            tally["step_time"] += time.monotonic() - t0
            if isinstance(r, Fixpoint):
                break
            it += 1
            a = r.element
            emit(StateInjected(it, r.state, a))
            if it >= cfg.max_iters:
                raise AbortAnalysis("iteration budget exhausted", a)
        if worker is not None:
            book.absorb(worker.results(wait=True), it, emit)
        if cfg.confirm and book.targets_open():
            # the certified element is itself an invariant and may settle targets
            In = conj(book.In(), dom.gamma(a)) if cfg.targets_use_invariants else TRUE
            t0 = time.monotonic()
            before = _calls(confirm_s)
            if worker is not None:
                worker.submit([], book.targets_open(), In)
                res = worker.results(wait=True)
            else:
                res = confirm([Candidate(f) for f in book.targets_open()], ts, cfg.k, In, confirm_s)
            tally["confirm_calls"] += _calls(confirm_s) - before
            tally["confirm_time"] += time.monotonic() - t0
            book.absorb(res, it, emit)
        result.final = a
        emit(PostFixpoint(a, it))
    except AbortAnalysis as e:
        if worker is not None:
            try:
                book.absorb(worker.results(wait=True), it, emit)
            except Exception:
                pass
        result.aborted = e.reason
        a = e.element if e.element is not None else a
        emit(Aborted(e.reason, a, tuple(book.confirmed), it))
    finally:
        if worker is not None:
            worker.stop()
    result.element = a
    result.iterations = it
    result.confirmed = list(book.confirmed)
    result.falsified = list(book.falsified.values())
    tally["engine_calls"] = tally["initial_calls"] + tally["step_calls"]
    tally["solver_calls"] = tally["engine_calls"] + tally["confirm_calls"]
    tally["iterations"] = it
    tally["wall_time"] = time.monotonic() - clock["start"]
    for key in ("sat", "unsat", "unknown"):
        tally[key] = getattr(engine_s, "stats", {}).get(key, 0) + (
            getattr(confirm_s, "stats", {}).get(key, 0) if confirm_s is not engine_s else 0
        )
    result.stats = dict(tally)
    log.info("analysis finished after %d iterations: %s", it, "aborted" if result.aborted else "post-fixpoint")
    return result


def describe(ev) -> str:
    """One-line human readable rendering of an event."""
    if isinstance(ev, InitAbstraction):
        return f"init {ev.element}"
    if isinstance(ev, StateInjected):
        return f"state {ev.iteration}: {ev.state} -> {ev.element}"
    if isinstance(ev, Candidates):
        return f"candidates {ev.iteration}: " + ", ".join(render(f) for f in ev.formulas)
    if isinstance(ev, InvariantConfirmed):
        return f"invariant {ev.iteration}: {render(ev.formula)} (k={ev.k})"
    if isinstance(ev, PostFixpoint):
        return f"postfix after {ev.iterations} iterations: {ev.element}"
    if isinstance(ev, Aborted):
        return f"abort: {ev.reason}"
    return repr(ev)
