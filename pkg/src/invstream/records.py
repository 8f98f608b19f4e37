"""Line-delimited JSON records for analysis events, and their replay.

Values and bounds are strings (``"2"``, ``"1/2"``, ``"true"``) so that no
precision is lost; formulas and elements use their native text forms.
"""

from __future__ import annotations

import json
from fractions import Fraction

from invstream.engine import (
    Aborted,
    AnalysisResult,
    Candidates,
    InitAbstraction,
    InvariantConfirmed,
    PostFixpoint,
    StateInjected,
)
from invstream.errors import ParseError
from invstream.frontend.native import parse_formula
from invstream.frontend.terms import Sort, render
from invstream.solver.evaluator import normalize


def value_text(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    f = Fraction(x)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_value_text(text: str, sort: Sort):
    if sort is Sort.BOOL:
        if text not in ("true", "false"):
            raise ParseError(f"bad Bool value {text!r}")
        return text == "true"
    return normalize(Fraction(text), sort)


def to_record(ev, ts) -> dict:
    if isinstance(ev, InitAbstraction):
        return {"event": "init", "element": str(ev.element), "iterations": ev.iterations}
    if isinstance(ev, StateInjected):
        return {
            "event": "state",
            "iter": ev.iteration,
            "values": {v.name: value_text(x) for v, x in zip(ts.vars, ev.state)},
            "element": str(ev.element),
        }
    if isinstance(ev, Candidates):
        return {"event": "candidates", "iter": ev.iteration, "formulas": [render(f) for f in ev.formulas]}
    if isinstance(ev, InvariantConfirmed):
        return {"event": "invariant", "iter": ev.iteration, "formula": render(ev.formula), "k": ev.k}
    if isinstance(ev, PostFixpoint):
        return {"event": "postfix", "iter": ev.iterations, "element": str(ev.element)}
    if isinstance(ev, Aborted):
        return {
            "event": "abort",
            "reason": ev.reason,
            "iter": ev.iterations,
            "element": str(ev.element),
            "confirmed": [{"formula": render(f), "k": k} for f, k in ev.confirmed],
        }
    raise TypeError(f"not an event: {ev!r}")


def dumps(record: dict) -> str:
    return json.dumps(record, ensure_ascii=False, sort_keys=False)


def stats_record(stats: dict) -> dict:
    return {"event": "stats", **stats}


def from_record(rec: dict, ts, dom):
    kind = rec.get("event")
    formula = lambda text: parse_formula(text, ts.vars)  # noqa: E731
    if kind == "init":
        return InitAbstraction(dom.parse(rec["element"]), rec.get("iterations", 0))
    if kind == "state":
        vals = rec["values"]
        state = tuple(parse_value_text(vals[v.name], v.sort) for v in ts.vars)
        return StateInjected(rec["iter"], state, dom.parse(rec["element"]))
    if kind == "candidates":
        return Candidates(rec["iter"], tuple(formula(t) for t in rec["formulas"]))
    if kind == "invariant":
        return InvariantConfirmed(rec["iter"], formula(rec["formula"]), rec["k"])
    if kind == "postfix":
        return PostFixpoint(dom.parse(rec["element"]), rec["iter"])
    if kind == "abort":
        confirmed = tuple((formula(c["formula"]), c["k"]) for c in rec.get("confirmed", []))
        return Aborted(rec["reason"], dom.parse(rec["element"]), confirmed, rec.get("iter", 0))
    return None


def replay(lines, ts, dom) -> AnalysisResult:
    """Rebuild an :class:`AnalysisResult` from JSONL text lines.

    Records other than events (``stats``, ``oracle``, ``target``) fill in the
    statistics or are skipped.
    """
    result = AnalysisResult(ts)
    for line in lines:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        if rec.get("event") == "stats":
            result.stats = {k: v for k, v in rec.items() if k != "event"}
            continue
        ev = from_record(rec, ts, dom)
        if ev is None:
            continue
        result.events.append(ev)
        if isinstance(ev, InitAbstraction):
            result.element = ev.element
        elif isinstance(ev, StateInjected):
            result.element = ev.element
            result.iterations = ev.iteration
        elif isinstance(ev, InvariantConfirmed):
            result.confirmed.append((ev.formula, ev.k))
        elif isinstance(ev, PostFixpoint):
            result.final = result.element = ev.element
            result.iterations = ev.iterations
        elif isinstance(ev, Aborted):
            result.aborted = ev.reason
            result.element = ev.element
            result.iterations = ev.iterations
    return result


SCHEMA_KEYS = {
    "init": {"element"},
    "state": {"iter", "values"},
    "candidates": {"iter", "formulas"},
    "invariant": {"iter", "formula", "k"},
    "postfix": {"iter", "element"},
    "abort": {"reason"},
    "stats": set(),
    "oracle": {"violations"},
    "target": {"stream", "confirmed"},
}


def validate(rec: dict):
    """Raise ``ValueError`` unless ``rec`` has the keys its event type requires."""
    kind = rec.get("event")
    if kind not in SCHEMA_KEYS:
        raise ValueError(f"unknown record type {kind!r}")
    missing = SCHEMA_KEYS[kind] - set(rec)
    if missing:
        raise ValueError(f"{kind} record lacks {', '.join(sorted(missing))}")
    if "iter" in rec and not isinstance(rec["iter"], int):
        raise ValueError("iter must be an integer")
    if kind == "state" and not all(isinstance(v, str) for v in rec["values"].values()):
        raise ValueError("state values must be strings")
    if kind == "invariant" and not (isinstance(rec["k"], int) and rec["k"] > 0):
        raise ValueError("k must be a positive integer")
