"""Intervals for numeric variables, value sets for Bool variables."""

from __future__ import annotations

from dataclasses import dataclass, field

from invstream.domains.base import Domain, Reader
from invstream.domains.bounds import (
    INF,
    NEG_INF,
    as_bound,
    is_finite,
    render_bound,
    sorted_thresholds,
    widen_lower,
    widen_upper,
)
from invstream.domains.space import Space
from invstream.frontend.terms import FALSE, Sort, le, neg, num

BOTH = frozenset((False, True))


@dataclass(frozen=True)
class BoxElement:
    """``num`` holds ``(lo, hi)`` per numeric variable, ``bools`` a value set per
    Bool variable. Bottom is the single element with both set to ``None``."""

    domain: "IntervalDomain" = field(compare=False, repr=False)
    num: tuple | None
    bools: tuple | None

    @property
    def is_bottom(self):
        return self.num is None

    def interval(self, name):
        for v, b in zip(self.domain.space.numeric, self.num):
            if v.name == name:
                return b
        raise KeyError(name)

    def values(self, name):
        for v, s in zip(self.domain.space.bools, self.bools):
            if v.name == name:
                return s
        raise KeyError(name)

    def __str__(self):
        return self.domain.render(self)


@dataclass(frozen=True)
class IntervalDomain(Domain):
    space: Space
    kind = "interval"

    def _int(self, i):
        return self.space.numeric[i].sort is Sort.INT

    def make(self, num, bools) -> BoxElement:
        """Build an element, collapsing empty coordinates to bottom."""
        num = tuple(num)
        bools = tuple(frozenset(b) for b in bools)
        if len(num) != len(self.space.numeric) or len(bools) != len(self.space.bools):
            raise ValueError("coordinate count does not match the space")
        if any(lo > hi for lo, hi in num) or any(not b for b in bools):
            return self.bottom()
        return BoxElement(self, num, bools)

    def bottom(self):
        return BoxElement(self, None, None)

    def top(self):
        return BoxElement(self, tuple((NEG_INF, INF) for _ in self.space.numeric),
                          tuple(BOTH for _ in self.space.bools))

    def is_bottom(self, a):
        return a.num is None

    def leq(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return True
        if b.is_bottom:
            return False
        return all(lb <= la and ua <= ub for (la, ua), (lb, ub) in zip(a.num, b.num)) and all(
            sa <= sb for sa, sb in zip(a.bools, b.bools)
        )

    def join(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return BoxElement(
            self,
            tuple((min(la, lb), max(ua, ub)) for (la, ua), (lb, ub) in zip(a.num, b.num)),
            tuple(sa | sb for sa, sb in zip(a.bools, b.bools)),
        )

    def meet(self, a, b):
        self.check(a, b)
        if a.is_bottom or b.is_bottom:
            return self.bottom()
        return self.make(
            ((max(la, lb), min(ua, ub)) for (la, ua), (lb, ub) in zip(a.num, b.num)),
            (sa & sb for sa, sb in zip(a.bools, b.bools)),
        )

    def widen(self, a, b, thresholds=()):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        ts = sorted_thresholds(thresholds)
        num = []
        for i, ((la, ua), (lb, ub)) in enumerate(zip(a.num, b.num)):
            integral = self._int(i)
            num.append((widen_lower(la, lb, ts, integral), widen_upper(ua, ub, ts, integral)))
        return BoxElement(self, tuple(num), tuple(sa | sb for sa, sb in zip(a.bools, b.bools)))

    def alpha(self, state):
        nums, bools = self.space.split(state)
        return BoxElement(
            self,
            tuple((as_bound(x, self._int(i)),) * 2 for i, x in enumerate(nums)),
            tuple(frozenset((bool(b),)) for b in bools),
        )

    def contains(self, a, state) -> bool:
        """Direct membership test, agreeing with evaluating ``gamma(a)``."""
        if a.is_bottom:
            return False
        nums, bools = self.space.split(state)
        return all(lo <= x <= hi for x, (lo, hi) in zip(nums, a.num)) and all(
            b in s for b, s in zip(bools, a.bools)
        )

    def conjuncts(self, a):
        if a.is_bottom:
            return [FALSE]
        out = []
        for v, (lo, hi) in zip(self.space.numeric, a.num):
            x = self.space.term(v)
            if is_finite(lo):
                out.append(le(num(lo, v.sort), x))
            if is_finite(hi):
                out.append(le(x, num(hi, v.sort)))
        for v, s in zip(self.space.bools, a.bools):
            if s == frozenset((True,)):
                out.append(self.space.term(v))
            elif s == frozenset((False,)):
                out.append(neg(self.space.term(v)))
        return out

    def render(self, a):
        if a.is_bottom:
            return "bottom"
        parts = [f"{v.name} ∈ [{render_bound(lo)}, {render_bound(hi)}]"
                 for v, (lo, hi) in zip(self.space.numeric, a.num)]
        for v, s in zip(self.space.bools, a.bools):
            vals = ", ".join(("false", "true")[b] for b in sorted(s))
            parts.append(f"{v.name} ∈ {{{vals}}}")
        return "box[" + ", ".join(parts) + "]"

    def read(self, r: Reader):
        if r.accept("bottom"):
            return self.bottom()
        r.expect("box[")
        nums = {v.name: (NEG_INF, INF) for v in self.space.numeric}
        bools = {v.name: BOTH for v in self.space.bools}
        sorts = {v.name: v.sort for v in self.space.variables}
        first = True
        while not r.accept("]"):
            if not first:
                r.expect(",")
            first = False
            name = r.ident()
            if name not in sorts:
                r.error(f"unknown variable {name}")
            r.expect("∈")
            if sorts[name] is Sort.BOOL:
                r.expect("{")
                vals = set()
                while not r.accept("}"):
                    if vals:
                        r.expect(",")
                    word = r.ident()
                    if word not in ("true", "false"):
                        r.error("expected true or false")
                    vals.add(word == "true")
                bools[name] = frozenset(vals)
            else:
                r.expect("[")
                lo = r.bound()
                r.expect(",")
                hi = r.bound()
                r.expect("]")
                integral = sorts[name] is Sort.INT
                nums[name] = (as_bound(lo, integral), as_bound(hi, integral))
        return self.make((nums[v.name] for v in self.space.numeric),
                         (bools[v.name] for v in self.space.bools))
