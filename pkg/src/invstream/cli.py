"""Command-line entry point: analyse a Lustre or native system and stream events.

Records go to standard output, one per line; diagnostics go to standard error.
Exit codes: 0 post-fixpoint (and target confirmed, with ``--prove``), 1 target
not confirmed, 2 aborted, 3 usage or input error, 4 oracle violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from invstream import __version__
from invstream.domains import KINDS, make_domain
from invstream.engine import EngineConfig, describe, run
from invstream.errors import InvStreamError, SolverError, SolverSpawnError
from invstream.frontend import parse_expression, parse_formula, parse_lustre, parse_native, translate
from invstream.frontend.lustre import INIT_FLAG
from invstream.frontend.terms import CUR, Sort, render
from invstream.oracle import bounds_from_source, enumerate_reachable, violations, write_states
from invstream.records import dumps, stats_record, to_record
from invstream.solver import BoundsSpec, DeterministicSession, Session, SolverConfig

log = logging.getLogger("invstream")

EXIT_OK, EXIT_UNPROVEN, EXIT_ABORTED, EXIT_USAGE, EXIT_UNSOUND = 0, 1, 2, 3, 4


class UsageError(InvStreamError):
    pass


@dataclass
class CliOptions:
    input: str
    domain: str = "product"
    partition: str | None = None
    widen_delay: int = 4
    thresholds: str = "auto"
    kind_k: int = 2
    solver: str | None = None
    timeout: float = 30.0
    emit: str = "jsonl"
    max_iters: int = 10000
    cadence: int = 1
    strengthen_current: bool = False
    deterministic: bool = False
    order: str | None = None
    oracle_bounds: str | None = None
    oracle_check: bool = False
    states_out: str | None = None
    prove: str | None = None
    aux_invariants: bool = True
    confirm: bool = True
    async_confirm: bool = False
    check_models: bool = False
    extra: dict = field(default_factory=dict)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invstream", description="Stream numerical invariants of a transition system.")
    p.add_argument("input", help="a .lus Lustre node or a .ts native system")
    p.add_argument("--domain", choices=KINDS, default="product")
    p.add_argument("--partition", metavar="F1;F2", help="Boolean partition predicates, ';'-separated")
    p.add_argument("--widen-delay", type=int, default=4, metavar="N")
    p.add_argument("--thresholds", default="auto", help="auto, none, or a comma-separated list of constants")
    p.add_argument("--kind-k", type=int, default=2, metavar="K")
    p.add_argument("--max-iters", type=int, default=10000, metavar="N")
    p.add_argument("--cadence", type=int, default=1, metavar="N", help="confirm candidates every N iterations")
    p.add_argument("--strengthen-current", action="store_true", help="also assert confirmed invariants on the current state")
    p.add_argument("--solver", metavar="PATH", help="SMT-LIB solver executable (default: $INVSTREAM_SOLVER or z3)")
    p.add_argument("--timeout", type=float, default=30.0, metavar="SECONDS", help="per-query solver timeout")
    p.add_argument("--emit", choices=("jsonl", "text"), default="jsonl")
    p.add_argument("--deterministic", action="store_true", help="pick least models by bounded enumeration")
    p.add_argument("--order", metavar="X,Y", help="variable comparison order for --deterministic model choice")
    p.add_argument("--oracle-bounds", metavar="SPEC", help='e.g. "x=-1..5,y=0..3"; defaults to the file header')
    p.add_argument("--oracle-check", action="store_true", help="check results against explicit reachability")
    p.add_argument("--states-out", metavar="FILE", help="write the oracle's reachable states")
    p.add_argument("--prove", metavar="STREAM", help="Bool stream to prove constantly true")
    p.add_argument("--no-aux-invariants", dest="aux_invariants", action="store_false",
                   help="check the --prove target without generated invariants")
    p.add_argument("--no-confirm", dest="confirm", action="store_false", help="skip k-induction entirely")
    p.add_argument("--async-confirm", action="store_true", help="confirm candidates on a worker thread")
    p.add_argument("--check-models", action="store_true", help="re-evaluate every solver model")
    p.add_argument("-v", "--verbose", action="count", default=0)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def options_from_args(ns: argparse.Namespace) -> CliOptions:
    fields = CliOptions.__dataclass_fields__
    return CliOptions(**{k: v for k, v in vars(ns).items() if k in fields})


# -- input handling ----------------------------------------------------------------


def load_system(path: str):
    """Returns ``(ts, source_text)``; raises :class:`UsageError` on any input problem."""
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such input file: {path}")
    try:
        text = p.read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e}") from None
    try:
        if p.suffix == ".lus":
            return translate(parse_lustre(text)), text
        return parse_native(text), text
    except InvStreamError as e:
        raise UsageError(f"{path}: {e}") from None


def parse_predicate(text: str, ts):
    """Native s-expression when it starts with '(', infix Lustre syntax otherwise."""
    text = text.strip()
    try:
        f = parse_formula(text, ts.vars) if text.startswith("(") else parse_expression(text, ts.vars)
    except InvStreamError as e:
        raise UsageError(f"bad formula {text!r}: {e}") from None
    if f.sort is not Sort.BOOL:
        raise UsageError(f"formula {text!r} is not Bool")
    return f


def parse_thresholds(text: str):
    if text == "auto":
        return None
    if text == "none":
        return frozenset()
    try:
        return frozenset(Fraction(c.strip()) for c in text.split(",") if c.strip())
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad threshold list {text!r}") from None


def target_formula(name: str, ts):
    if name == INIT_FLAG:
        raise UsageError(f"{name!r} is internal, not a stream")
    try:
        v = ts.var(name)
    except KeyError:
        raise UsageError(f"--prove: no stream named {name!r}") from None
    if v.sort is not Sort.BOOL:
        raise UsageError(f"--prove: stream {name!r} is not Bool")
    return v.at(CUR)


def selection_order(text: str | None, ts) -> list:
    if not text:
        return [v.name for v in ts.vars if v.kind != "input" and v.sort.is_numeric]
    names = [n.strip() for n in text.split(",") if n.strip()]
    for n in names:
        if n not in ts.names:
            raise UsageError(f"--order: no variable named {n!r}")
    return names


def resolve_bounds(opts: CliOptions, ts, source: str) -> BoundsSpec | None:
    try:
        if opts.oracle_bounds:
            return BoundsSpec.parse(opts.oracle_bounds, ts.vars)
        return bounds_from_source(source, ts.vars)
    except (InvStreamError, ValueError) as e:
        raise UsageError(f"bad oracle bounds: {e}") from None


# -- running -------------------------------------------------------------------------


class _Out:
    def __init__(self, ts, mode, stream):
        self.ts, self.mode, self.stream = ts, mode, stream

    def record(self, rec: dict, text: str):
        self.stream.write((dumps(rec) if self.mode == "jsonl" else text) + "\n")
        self.stream.flush()

    def event(self, ev):
        self.record(to_record(ev, self.ts), describe(ev))


def _stats_text(stats):
    keys = ("iterations", "engine_calls", "confirm_calls", "solver_calls", "wall_time")
    return "stats " + " ".join(
        f"{k}={stats[k]:.3f}" if isinstance(stats.get(k), float) else f"{k}={stats.get(k, 0)}" for k in keys
    )


def run_cli(opts: CliOptions, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    sessions = []
    try:
        ts, source = load_system(opts.input)
        preds = [parse_predicate(t, ts) for t in (opts.partition or "").split(";") if t.strip()]
        target = target_formula(opts.prove, ts) if opts.prove else None
        bounds = resolve_bounds(opts, ts, source)
        if opts.deterministic and bounds is None:
            raise UsageError("--deterministic needs oracle bounds (--oracle-bounds or a file header)")
        if opts.oracle_check and bounds is None:
            raise UsageError("--oracle-check needs oracle bounds (--oracle-bounds or a file header)")
        try:
            dom = make_domain(opts.domain, ts, preds)
            cfg = EngineConfig(
                widen_delay=opts.widen_delay,
                thresholds=parse_thresholds(opts.thresholds),
                max_iters=opts.max_iters,
                strengthen_current=opts.strengthen_current,
                cadence=opts.cadence,
                k=opts.kind_k,
                confirm=opts.confirm or target is not None,
                targets=(target,) if target is not None else (),
                targets_use_invariants=opts.aux_invariants,
                async_confirm=opts.async_confirm,
                check_models=opts.check_models,
            )
            if opts.timeout <= 0:
                raise ValueError("timeout must be positive")
            scfg = SolverConfig(path=opts.solver or "", timeout_ms=max(1, int(opts.timeout * 1000)))
        except ValueError as e:
            raise UsageError(str(e)) from None
        try:
            confirm_s = Session(scfg)
            sessions.append(confirm_s)
            engine_s = Session(scfg)  # separate assertion stacks for loop and confirmer
            sessions.append(engine_s)
        except SolverSpawnError as e:
            raise UsageError(str(e)) from None
        if opts.deterministic:
            # state streams first by default, so the least model is the least reachable point
            prefer = selection_order(opts.order, ts)
            engine_s = DeterministicSession(bounds, backing=engine_s, prefer=prefer)
    except UsageError as e:
        print(f"invstream: {e}", file=err)
        for s in sessions:
            s.close(force=True)
        return EXIT_USAGE

    sink = _Out(ts, opts.emit, out)
    try:
        try:
            result = run(ts, dom, cfg, (engine_s, confirm_s), sink.event)
        except SolverError as e:
            print(f"invstream: solver failure: {e}", file=err)
            sink.record({"event": "abort", "reason": f"solver failure: {e}"}, f"abort: solver failure: {e}")
            return EXIT_ABORTED
    finally:
        for s in sessions:
            s.close(force=True)

    sink.record(stats_record(result.stats), _stats_text(result.stats))
    proven = None
    if target is not None:
        ks = [k for f, k in result.confirmed if f == target]
        proven = bool(ks)
        rec = {"event": "target", "stream": opts.prove, "confirmed": proven}
        if proven:
            rec["k"] = ks[0]
        sink.record(rec, f"target {opts.prove}: {'confirmed' if proven else 'not confirmed'}")

    unsound = False
    if opts.oracle_check:
        reach = enumerate_reachable(ts, bounds)
        if opts.states_out:
            write_states(opts.states_out, reach)
        checked = [f for f, _ in result.confirmed]
        if result.final is not None:
            checked.append(dom.gamma(result.final))
        bad = []
        for f in checked:
            vs = violations(f, reach)
            if vs:
                bad.append(f)
                print(f"invstream: oracle violation of {render(f)} at {vs[0]}", file=err)
        unsound = bool(bad)
        rec = {
            "event": "oracle",
            "violations": len(bad),
            "checked": len(checked),
            "states": len(reach.states),
            "complete": reach.complete,
        }
        if not reach.complete:
            rec["reason"] = reach.reason
            print(f"invstream: oracle result is advisory: {reach.reason}", file=err)
        sink.record(rec, f"oracle: {len(bad)} violations over {len(reach.states)} states"
                         + ("" if reach.complete else " (advisory)"))
    elif opts.states_out:
        if bounds is None:
            print("invstream: --states-out ignored without oracle bounds", file=err)
        else:
            write_states(opts.states_out, enumerate_reachable(ts, bounds))

    if unsound:
        return EXIT_UNSOUND
    if result.aborted:
        print(f"invstream: aborted: {result.aborted}", file=err)
        return EXIT_ABORTED
    if proven is False:
        return EXIT_UNPROVEN
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; this tool reserves 2 for aborts
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(
        level=logging.WARNING - 10 * min(ns.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return run_cli(options_from_args(ns))
    except BrokenPipeError:
        # the reader went away (e.g. piped into head); silence the final flush
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_ABORTED


if __name__ == "__main__":
    sys.exit(main())
