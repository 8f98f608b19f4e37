"""Product of intervals and templates with a single reduction pass after meet."""

from __future__ import annotations

from dataclasses import dataclass, field

from invstream.domains.base import Domain, Reader
from invstream.domains.bounds import bound_sum, ceil_bound, floor_bound
from invstream.domains.box import BoxElement, IntervalDomain
from invstream.domains.space import Space
from invstream.domains.template import TemplateDomain, TemplateElement
from invstream.frontend.terms import FALSE, Sort


@dataclass(frozen=True)
class ProductElement:
    domain: "ProductDomain" = field(compare=False, repr=False)
    box: BoxElement
    tpl: TemplateElement

    @property
    def is_bottom(self):
        return self.box.is_bottom

    def __str__(self):
        return self.domain.render(self)


@dataclass(frozen=True)
class ProductDomain(Domain):
    boxes: IntervalDomain
    templates: TemplateDomain
    kind = "product"

    def __post_init__(self):
        if self.boxes.space != self.templates.space:
            raise ValueError("product components range over different spaces")

    @classmethod
    def over(cls, space: Space, templates=None) -> "ProductDomain":
        return cls(IntervalDomain(space), TemplateDomain(space, templates))

    @property
    def space(self):
        return self.boxes.space

    def make(self, box, tpl) -> ProductElement:
        if box.is_bottom or tpl.is_bottom:
            return self.bottom()
        return ProductElement(self, box, tpl)

    def bottom(self):
        return ProductElement(self, self.boxes.bottom(), self.templates.bottom())

    def top(self):
        return ProductElement(self, self.boxes.top(), self.templates.top())

    def is_bottom(self, a):
        return a.is_bottom

    def reduce(self, box: BoxElement, tpl: TemplateElement) -> ProductElement:
        """One propagation pass: single-variable templates tighten intervals,
        then intervals tighten every template bound."""
        if box.is_bottom or tpl.is_bottom:
            return self.bottom()
        space = self.space
        num = list(box.num)
        for t, c in zip(self.templates.templates, tpl.c):
            single = t.single()
            if single is None:
                continue
            i, a = single
            integral = space.numeric[i].sort is Sort.INT
            lo, hi = num[i]
            # a*x <= c bounds x above for a > 0 and below for a < 0
            if a > 0:
                hi = min(hi, floor_bound(c / a, integral))
            else:
                lo = max(lo, ceil_bound(c / a, integral))
            num[i] = (lo, hi)
        new_box = self.boxes.make(num, box.bools)
        if new_box.is_bottom:
            return self.bottom()
        cs = []
        for t, c in zip(self.templates.templates, tpl.c):
            parts = []
            for i in t.support:
                a = t.coeffs[i]
                lo, hi = new_box.num[i]
                parts.append(a * hi if a > 0 else a * lo)
            cs.append(min(c, bound_sum(parts)))
        return self.make(new_box, self.templates.make(cs))

    def leq(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return True
        if b.is_bottom:
            return False
        return self.boxes.leq(a.box, b.box) and self.templates.leq(a.tpl, b.tpl)

    def join(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return ProductElement(self, self.boxes.join(a.box, b.box), self.templates.join(a.tpl, b.tpl))

    def meet(self, a, b):
        self.check(a, b)
        if a.is_bottom or b.is_bottom:
            return self.bottom()
        return self.reduce(self.boxes.meet(a.box, b.box), self.templates.meet(a.tpl, b.tpl))

    def widen(self, a, b, thresholds=()):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return ProductElement(
            self,
            self.boxes.widen(a.box, b.box, thresholds),
            self.templates.widen(a.tpl, b.tpl, thresholds),
        )

    def alpha(self, state):
        return ProductElement(self, self.boxes.alpha(state), self.templates.alpha(state))

    def contains(self, a, state) -> bool:
        return (not a.is_bottom and self.boxes.contains(a.box, state)
                and self.templates.contains(a.tpl, state))

    def conjuncts(self, a):
        if a.is_bottom:
            return [FALSE]
        out = self.boxes.conjuncts(a.box)
        seen = set(out)
        for c in self.templates.conjuncts(a.tpl):
            if c not in seen:
                seen.add(c)
                out.append(c)
        return out

    def render(self, a):
        if a.is_bottom:
            return "bottom"
        return f"prod({self.boxes.render(a.box)}, {self.templates.render(a.tpl)})"

    def read(self, r: Reader):
        if r.accept("bottom"):
            return self.bottom()
        r.expect("prod(")
        box = self.boxes.read(r)
        r.expect(",")
        tpl = self.templates.read(r)
        r.expect(")")
        return self.make(box, tpl)

