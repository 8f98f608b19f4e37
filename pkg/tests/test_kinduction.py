import random

import pytest

from invstream.frontend import Sort
from invstream.frontend.terms import TRUE, at_step, Var, conj, implies, le, lt, num, sub
from invstream.kinduction import (
    CONFIRMED,
    FALSIFIED,
    UNKNOWN,
    Candidate,
    check_base,
    check_step,
    confirm,
    unroll,
)
from invstream.oracle import check_invariant, enumerate_reachable, simulate_lustre
from invstream.solver import holds
from systems import counters, counters_bounds, counters_program, mod4, random_inputs

X = Var("x", Sort.INT)
Y = Var("y", Sort.INT)
N2 = Var("n2", Sort.INT)
OBS = Var("obs", Sort.BOOL)


def test_unroll_k1():
    ts = mod4()
    ctx = unroll(ts, 1)
    assert ctx.steps[0] == at_step(ts.trans, 0)
    names = {v.key for v in ctx.copies[0] + ctx.copies[1]}
    assert names == {("x", 0), ("x", 1)}


def test_unroll_k3_counters():
    ts = counters()
    ctx = unroll(ts, 3)
    assert len(ctx.steps) == 3 and len(ctx.copies) == 4
    assert Var("x", Sort.INT, 3) in ctx.copies[3]
    with pytest.raises(ValueError):
        unroll(ts, 0)


def test_path_holds_on_simulated_trace():
    prog = counters_program(4, 2)
    ts = counters(4, 2)
    rng = random.Random(3)
    for _ in range(5):
        trace = simulate_lustre(prog, random_inputs(prog, rng, 4))
        ctx = unroll(ts, 3)
        env = {}
        for i, row in enumerate(trace):
            for v in ts.vars:
                if v.name == "__init":
                    env[(v.name, i)] = i == 0
                else:
                    env[(v.name, i)] = row[v.name]
        assert holds(ctx.path, env)
        assert holds(ctx.at(ts.init, 0), env)


def test_base_true(session):
    assert check_base(TRUE, mod4(), 5, session).holds


def test_base_counterexample(session):
    r = check_base(le(X, num(2)), mod4(), 4, session)
    assert not r.holds and r.depth == 3
    assert [s[0] for s in r.trace] == [0, 1, 2, 3]


def test_base_and_step_hold(session):
    ts = mod4()
    assert check_base(le(num(0), X), ts, 4, session).holds
    assert check_step(le(num(0), X), ts, 1, TRUE, session).holds


def test_base_depth_monotone(session):
    ts = mod4()
    for k in range(1, 6):
        P = le(X, num(2))
        if check_base(P, ts, k, session).holds:
            assert k == 1 or check_base(P, ts, k - 1, session).holds


def test_obs_needs_auxiliary_invariants(session):
    ts = counters(100, 50)
    assert not check_step(OBS, ts, 2, TRUE, session).holds
    aux = conj(le(num(0), X), le(num(0), Y), le(X, num(100)), le(Y, num(50)), implies(lt(Y, N2), le(sub(X, Y), num(0))))
    assert check_step(OBS, ts, 2, aux, session).holds


def test_confirm_triangle_batch(session):
    ts = counters(100, 50)
    batch = [le(num(0), X), le(num(0), Y), implies(lt(Y, N2), le(sub(X, Y), num(0)))]
    got = confirm([Candidate(f) for f in batch], ts, 2, TRUE, session)
    assert [c.status for c in got] == [CONFIRMED] * 3


def test_confirm_falsifies_with_trace(session):
    ts = mod4()
    (c,) = confirm([Candidate(le(X, num(2)))], ts, 4, TRUE, session)
    assert c.status == FALSIFIED and len(c.trace) == 4
    # the trace replays: I at step 0, T at each step, not P at the end
    env = {(v.name, i): s[j] for i, s in enumerate(c.trace) for j, v in enumerate(ts.vars)}
    ctx = unroll(ts, 3)
    assert holds(ctx.at(ts.init, 0), env) and holds(ctx.path, env)
    assert not holds(ctx.at(c.formula, 3), env)


def test_confirm_empty(session):
    assert confirm([], mod4(), 2, TRUE, session) == []


def test_step_cex_is_not_a_refutation(session):
    ts = counters(100, 50)
    (c,) = confirm([Candidate(OBS)], ts, 2, TRUE, session)
    assert c.status == UNKNOWN and c.note == "inconclusive"


def test_confirmed_hold_on_oracle(session):
    ts = counters(4, 2)
    reach = enumerate_reachable(ts, counters_bounds(4, 2))
    vs = [X, Y]
    cands = [le(num(c), v) for v in vs for c in (-1, 0, 1)] + [le(v, num(c)) for v in vs for c in (1, 2, 3, 4)]
    cands += [le(sub(X, Y), num(c)) for c in (-1, 0, 2)] + [implies(lt(Y, N2), le(sub(X, Y), num(0)))]
    for c in confirm([Candidate(f) for f in cands], ts, 2, TRUE, session):
        if c.status == CONFIRMED:
            assert check_invariant(c.formula, reach).holds
        if c.status == FALSIFIED:
            assert not check_invariant(c.formula, reach).holds


def test_monotone_in_In(session):
    ts = counters(100, 50)
    cands = [le(X, num(100)), implies(lt(Y, N2), le(sub(X, Y), num(0))), OBS]
    first = confirm([Candidate(f) for f in cands], ts, 2, TRUE, session)
    stronger = conj(le(num(0), X), le(num(0), Y))
    second = confirm([Candidate(f) for f in cands], ts, 2, stronger, session)
    for a, b in zip(first, second):
        if a.status == CONFIRMED:
            assert b.status == CONFIRMED


def test_candidate_str():
    c = Candidate(le(num(0), X))
    assert str(c) == "(<= 0 x) [unknown]"
    assert not c.confirmed and not c.falsified
