"""Test fixtures: the case-study counters at any scale and random bounded systems."""

from __future__ import annotations

import random
from pathlib import Path

from invstream.frontend import Sort, Variable, make_system, parse_lustre, translate
from invstream.frontend.terms import (
    CUR,
    PRIMED,
    add,
    conj,
    const,
    eq,
    ite,
    le,
    lt,
    neg,
    num,
)
from invstream.solver import BoundsSpec

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"

COUNTERS = """\
node parallel_counters (a, b, c:bool) returns (x, y: int; obs:bool);
var n1, n2:int;
let
  n1 = {n1}; n2 = {n2};
  x = 0 -> if (b or c) then 0 else
    if a and (pre x) < n1 then (pre x) + 1 else pre x;
  y = 0 -> if c then 0 else
    if a and (pre y) < n2 then (pre y) + 1 else pre y;
  obs = (x = n1) implies (y = n2);
tel
"""


def counters_program(n1=10000, n2=5000):
    return parse_lustre(COUNTERS.format(n1=n1, n2=n2))


def counters(n1=10000, n2=5000):
    return translate(counters_program(n1, n2))


def counters_bounds(n1, n2):
    return BoundsSpec.of(x=(0, n1 + 1), y=(0, n2 + 1), n1=(n1, n1), n2=(n2, n2))


def mod4():
    """I: x = 0; T: x' = ite(x < 3, x + 1, 0)."""
    x = Variable("x", Sort.INT)
    xc, xp = x.at(CUR), x.at(PRIMED)
    return make_system([x], eq(xc, num(0)), eq(xp, ite(lt(xc, num(3)), add(xc, num(1)), num(0))))


def shipped_lustre():
    return sorted(p for p in PROGRAMS.glob("*.lus") if "oracle-bounds: none" not in p.read_text())


def shipped_all():
    return sorted(
        p for p in list(PROGRAMS.glob("*.lus")) + list(PROGRAMS.glob("*.ts"))
        if "oracle-bounds: none" not in p.read_text()
    )


LIMIT = 8


def random_system(rng: random.Random):
    """A random system with 1..4 Int variables kept inside [-8, 8] by
    saturating updates, and 0..3 Bool variables (some of them inputs)."""
    n_int = rng.randint(1, 4)
    n_bool = rng.randint(0, 3)
    ints = [Variable(f"x{i}", Sort.INT) for i in range(n_int)]
    bools = [Variable(f"b{i}", Sort.BOOL, rng.choice(["state", "input"])) for i in range(n_bool)]
    cur = {v.name: v.at(CUR) for v in ints + bools}
    nxt = {v.name: v.at(PRIMED) for v in ints + bools}

    def bool_atom():
        choices = []
        if bools:
            choices.append(lambda: cur[rng.choice(bools).name])
        choices.append(lambda: le(cur[rng.choice(ints).name], num(rng.randint(-LIMIT, LIMIT))))
        if len(ints) > 1:
            choices.append(lambda: lt(cur[rng.choice(ints).name], cur[rng.choice(ints).name]))
        t = rng.choice(choices)()
        return neg(t) if rng.random() < 0.3 else t

    init = []
    for v in ints:
        c = rng.randint(-3, 3)
        init.append(eq(cur[v.name], num(c)) if rng.random() < 0.8 else conj(le(num(c - 1), cur[v.name]), le(cur[v.name], num(c + 1))))
    for v in bools:
        if v.kind == "state" and rng.random() < 0.7:
            init.append(cur[v.name] if rng.random() < 0.5 else neg(cur[v.name]))

    trans = []
    for v in ints:
        x, d = cur[v.name], rng.choice([-2, -1, 1, 1, 2])
        stepped = add(x, num(d))
        in_range = conj(le(num(-LIMIT), stepped), le(stepped, num(LIMIT)))
        kind = rng.random()
        if kind < 0.6:
            rhs = ite(conj(bool_atom(), in_range), stepped, x)
        elif kind < 0.8:
            rhs = ite(bool_atom(), num(rng.randint(-3, 3)), ite(in_range, stepped, x))
        else:
            other = cur[rng.choice(ints).name]
            rhs = ite(bool_atom(), other, ite(in_range, stepped, x))
        trans.append(eq(nxt[v.name], rhs))
    for v in bools:
        if v.kind == "input":
            continue
        r = rng.random()
        if r < 0.4:
            trans.append(eq(nxt[v.name], neg(cur[v.name])))
        elif r < 0.8:
            trans.append(eq(nxt[v.name], bool_atom()))
        # otherwise left free
    ts = make_system(ints + bools, conj(*init), conj(*trans))
    bounds = BoundsSpec.of(**{v.name: (-LIMIT, LIMIT) for v in ints})
    return ts, bounds


def random_inputs(prog, rng: random.Random, length: int):
    """Input valuations for a Lustre program; Int inputs drawn from [-3, 3]."""
    rows = []
    for _ in range(length):
        row = {}
        for v in prog.inputs:
            if v.sort is Sort.BOOL:
                row[v.name] = rng.random() < 0.5
            elif v.sort is Sort.INT:
                row[v.name] = rng.randint(-3, 3)
            else:
                row[v.name] = const(rng.randint(-6, 6)).value / 2
        rows.append(row)
    return rows

