"""Lattice laws checked by brute force over small bounded universes."""

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from invstream.domains import (
    INF,
    NEG_INF,
    alpha_Q,
    conjuncts,
    gamma_F,
    join,
    leq,
    make_domain,
    meet,
    render_element,
    widen,
)
from invstream.domains.bounds import render_bound, threshold_above, widen_upper
from invstream.errors import DomainMismatchError, ParseError
from invstream.frontend import Sort, Variable, parse_expression
from invstream.frontend.terms import FALSE, TRUE, Var, implies, le, num, render, sub
from invstream.solver import compile_term

VARS = [Variable("x", Sort.INT), Variable("y", Sort.INT), Variable("z", Sort.INT), Variable("b", Sort.BOOL)]
RANGE = range(-4, 5)
UNIVERSE = [(x, y, z, b) for x in RANGE for y in RANGE for z in RANGE for b in (False, True)]  # 1458 states
KINDS = ["interval", "template", "product"]


def sat(formula):
    f = compile_term(formula)
    return frozenset(s for s in UNIVERSE if f(env(s)) is True)


def env(state):
    return {(v.name, "cur"): x for v, x in zip(VARS, state)}


def domain(kind, partition=False):
    preds = [parse_expression("x < y", VARS)] if partition else []
    return make_domain(kind, VARS, preds)


def n_coordinates(dom):
    kind = getattr(dom, "kind", "")
    if kind == "partition":
        return len(dom.valuations) * n_coordinates(dom.base)
    if kind == "interval":
        return 2 * len(dom.space.numeric) + len(dom.space.bools)
    if kind == "template":
        return len(dom.templates)
    return n_coordinates(dom.boxes) + n_coordinates(dom.templates)


states = st.tuples(st.sampled_from(RANGE), st.sampled_from(RANGE), st.sampled_from(RANGE), st.booleans())


@st.composite
def elements(draw, dom):
    """Joins of a few points, sometimes widened or met with another such join."""
    def hull():
        a = dom.bottom()
        for s in draw(st.lists(states, min_size=0, max_size=4)):
            a = dom.join(a, dom.alpha(s))
        return a

    a = hull()
    r = draw(st.integers(0, 3))
    if r == 1:
        a = dom.widen(a, dom.join(a, hull()), draw(st.sets(st.integers(-5, 5), max_size=3)))
    elif r == 2:
        a = dom.meet(a, hull())
    return a


PARAMS = [(k, p) for k in KINDS for p in (False, True)]


@pytest.mark.parametrize("kind,part", PARAMS)
@given(data=st.data())
def test_join_soundness_and_upper_bound(kind, part, data):
    dom = domain(kind, part)
    a, b = data.draw(elements(dom)), data.draw(elements(dom))
    j = join(a, b)
    assert leq(a, j) and leq(b, j)
    assert sat(gamma_F(a)) | sat(gamma_F(b)) <= sat(gamma_F(j))
    assert join(a, dom.bottom()) == a


@pytest.mark.parametrize("kind,part", PARAMS)
@given(data=st.data())
def test_gamma_monotone(kind, part, data):
    dom = domain(kind, part)
    a, b = data.draw(elements(dom)), data.draw(elements(dom))
    if leq(a, b):
        assert sat(gamma_F(a)) <= sat(gamma_F(b))
    assert leq(dom.bottom(), a) and leq(a, dom.top())


@pytest.mark.parametrize("kind,part", PARAMS)
@given(data=st.data())
def test_widen_covers_join(kind, part, data):
    dom = domain(kind, part)
    a, b = data.draw(elements(dom)), data.draw(elements(dom))
    thr = data.draw(st.sets(st.integers(-6, 6), max_size=4))
    assert leq(join(a, b), widen(a, b, thr))
    assert widen(a, a, thr) == a


@pytest.mark.parametrize("kind", KINDS)
@given(data=st.data())
def test_meet_complete(kind, data):
    dom = domain(kind)
    a, b = data.draw(elements(dom)), data.draw(elements(dom))
    m = meet(a, b)
    assert sat(gamma_F(m)) == sat(gamma_F(a)) & sat(gamma_F(b))
    assert leq(m, a) and leq(m, b)


@pytest.mark.parametrize("kind,part", PARAMS)
@given(s=states)
def test_point_precision(kind, part, s):
    dom = domain(kind, part)
    p = alpha_Q(dom, s)
    got = sat(gamma_F(p))
    assert s in got
    if kind != "template":
        assert got == {s}


@pytest.mark.parametrize("kind,part", PARAMS)
@given(data=st.data())
def test_conjuncts_match_gamma(kind, part, data):
    dom = domain(kind, part)
    a = data.draw(elements(dom))
    whole = compile_term(gamma_F(a))
    parts = [compile_term(c) for c in conjuncts(a)]
    for s in random.Random(0).sample(UNIVERSE, 200):
        e = env(s)
        assert whole(e) == all(f(e) for f in parts)


@pytest.mark.parametrize("kind,part", PARAMS)
@given(data=st.data())
def test_render_parse_round_trip(kind, part, data):
    dom = domain(kind, part)
    a = data.draw(elements(dom))
    assert dom.parse(render_element(a)) == a


@pytest.mark.parametrize("kind,part", PARAMS)
def test_widening_chains_stabilize(kind, part):
    dom = domain(kind, part)
    rng = random.Random(f"{kind}/{part}")
    bound_hit = 0
    for _ in range(60):
        thr = frozenset(rng.sample(range(-6, 7), rng.randint(0, 4)))
        limit = (len(thr) + 2) * n_coordinates(dom)
        c = dom.bottom()
        a = dom.bottom()
        changes = 0
        for _ in range(40):
            c = dom.join(c, dom.alpha(tuple(rng.randint(-4, 4) for _ in range(3)) + (rng.random() < 0.5,)))
            nxt = dom.widen(a, dom.join(a, c), thr)
            assert leq(a, nxt) and leq(c, nxt)
            if nxt != a:
                changes += 1
            a = nxt
        assert changes <= limit
        bound_hit = max(bound_hit, changes)
    assert bound_hit > 0


# -- examples -------------------------------------------------------------------------------

ONE = [Variable("x", Sort.INT)]


def box(text, vars_=ONE):
    return make_domain("interval", vars_).parse(text)


def test_interval_examples():
    assert leq(box("box[x ∈ [0, 1]]"), box("box[x ∈ [0, 5]]"))
    assert join(box("box[x ∈ [0, 1]]"), box("box[x ∈ [3, 4]]")) == box("box[x ∈ [0, 4]]")
    assert meet(box("box[x ∈ [0, 5]]"), box("box[x ∈ [3, 9]]")) == box("box[x ∈ [3, 5]]")
    assert meet(box("box[x ∈ [0, 1]]"), box("box[x ∈ [2, 3]]")).is_bottom
    assert widen(box("box[x ∈ [0, 2]]"), box("box[x ∈ [0, 3]]"), {100}) == box("box[x ∈ [0, 100]]")
    assert widen(box("box[x ∈ [0, 2]]"), box("box[x ∈ [0, 3]]"), ()) == box("box[x ∈ [0, +inf]]")


def test_gamma_examples():
    x = Var("x", Sort.INT)
    assert conjuncts(box("box[x ∈ [0, 3]]")) == [le(num(0), x), le(x, num(3))]
    assert conjuncts(box("box[x ∈ [0, 10000]]")) == [le(num(0), x), le(x, num(10000))]
    assert gamma_F(box("box[x ∈ [-inf, +inf]]")) == TRUE
    assert conjuncts(make_domain("interval", ONE).bottom()) == [FALSE]


def test_point_abstraction_example():
    vs = [Variable("x", Sort.INT), Variable("y", Sort.INT)]
    p = alpha_Q(make_domain("product", vs), (2, 1))
    assert p.box.num == ((2, 2), (1, 1))
    x, y = Var("x", Sort.INT), Var("y", Sort.INT)
    cs = conjuncts(p)
    assert le(sub(x, y), num(1)) in cs and le(sub(y, x), num(-1)) in cs


def test_bool_component():
    vs = [Variable("x", Sort.INT), Variable("obs", Sort.BOOL)]
    p = alpha_Q(make_domain("interval", vs), (0, True))
    assert p.values("obs") == {True}


def test_dark_triangle():
    vs = [Variable("x", Sort.INT), Variable("y", Sort.INT)]
    dom = make_domain("product", vs)
    a = dom.bottom()
    for s in [(0, 0), (0, 1), (1, 1)]:
        a = join(a, alpha_Q(dom, s))
    x, y = Var("x", Sort.INT), Var("y", Sort.INT)
    cs = conjuncts(a)
    for c in [le(num(0), x), le(x, num(1)), le(num(0), y), le(y, num(1)), le(sub(x, y), num(0))]:
        assert c in cs
    pts = {(xv, yv) for xv in range(-2, 4) for yv in range(-2, 4)
           if compile_term(gamma_F(a))({("x", "cur"): xv, ("y", "cur"): yv})}
    assert pts == {(0, 0), (0, 1), (1, 1)}


def test_partition_guarded_conjunct():
    vs = [Variable("x", Sort.INT), Variable("y", Sort.INT), Variable("n2", Sort.INT)]
    pred = parse_expression("y < n2", vs)
    dom = make_domain("product", vs, [pred])
    a = dom.bottom()
    for s in [(0, 0, 50), (1, 1, 50), (0, 1, 50), (80, 50, 50), (0, 50, 50)]:
        a = join(a, alpha_Q(dom, s))
    x, y = Var("x", Sort.INT), Var("y", Sort.INT)
    assert implies(pred, le(sub(x, y), num(0))) in conjuncts(a)


def test_partition_limits():
    preds = [parse_expression(f"x < {i}", ONE) for i in range(9)]
    with pytest.raises(ValueError):
        make_domain("interval", ONE, preds)
    with pytest.raises(ValueError):
        make_domain("interval", ONE, [parse_expression("x + 1", ONE)])


def test_mismatch_and_parse_errors():
    a = make_domain("interval", ONE).top()
    b = make_domain("template", ONE).top()
    with pytest.raises(DomainMismatchError):
        join(a, b)
    with pytest.raises(ParseError):
        make_domain("interval", ONE).parse("box[q ∈ [0, 1]]")


def test_real_bounds_render_exactly():
    vs = [Variable("r", Sort.REAL)]
    dom = make_domain("interval", vs)
    a = dom.alpha((Fraction(1, 3),))
    assert "1/3" in render_element(a)
    assert dom.parse(render_element(a)) == a


def test_bound_helpers():
    assert threshold_above(3, (0, 5, 10)) == 5
    assert threshold_above(11, (0, 5, 10)) == INF
    assert widen_upper(2, 3, (100,)) == 100
    assert widen_upper(2, 2, (100,)) == 2
    assert render_bound(NEG_INF) == "-inf"
    assert render(le(num(0), Var("x", Sort.INT))) == "(<= 0 x)"


def test_universe_size():
    assert len(UNIVERSE) <= 10**4
