"""Template constraint domain: one upper bound per linear form ``t(x) <= c``."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from invstream.domains.base import Domain, Reader
from invstream.domains.bounds import (
    INF,
    floor_bound,
    is_finite,
    render_bound,
    sorted_thresholds,
    threshold_above,
)
from invstream.domains.space import Space
from invstream.frontend.terms import FALSE, Sort, add, le, minus, mul, num, sub


@dataclass(frozen=True)
class Template:
    """Coefficients aligned with the numeric variables of a space."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(Fraction(c) for c in self.coeffs)
        if not any(cs):
            raise ValueError("template with all-zero coefficients")
        object.__setattr__(self, "coeffs", cs)

    @classmethod
    def canonical(cls, coeffs) -> "Template":
        """Scale so the first nonzero coefficient is +1 or -1."""
        cs = [Fraction(c) for c in coeffs]
        lead = next(c for c in cs if c != 0)
        return cls(tuple(c / abs(lead) for c in cs))

    @property
    def support(self):
        return [i for i, c in enumerate(self.coeffs) if c != 0]

    def negated(self) -> "Template":
        return Template(tuple(-c for c in self.coeffs))

    def value(self, nums):
        return sum((c * x for c, x in zip(self.coeffs, nums) if c != 0), Fraction(0))

    def integral(self, space: Space) -> bool:
        """True when the form only takes integer values (Int variables, integer coefficients)."""
        return all(space.numeric[i].sort is Sort.INT and self.coeffs[i].denominator == 1
                   for i in self.support)

    def single(self):
        """``(index, sign)`` for a one-variable form, else ``None``."""
        s = self.support
        if len(s) == 1:
            return s[0], self.coeffs[s[0]]
        return None

    def atom(self, space: Space, c):
        """The constraint ``t(x) <= c`` as a term."""
        sort = Sort.INT if self.integral(space) else Sort.REAL
        bound = num(floor_bound(c, True) if sort is Sort.INT else Fraction(c), sort)
        s = self.support
        vs = [space.term(space.numeric[i]) for i in s]
        cs = [self.coeffs[i] for i in s]
        if len(s) == 1 and abs(cs[0]) == 1:
            if cs[0] > 0:
                return le(vs[0], bound)
            return le(num(-bound.value, sort), vs[0])
        if len(s) == 2 and sorted(cs) == [-1, 1]:
            pos, negv = (vs[0], vs[1]) if cs[0] > 0 else (vs[1], vs[0])
            return le(sub(pos, negv), bound)
        parts = []
        for c, v in zip(cs, vs):
            if c == 1:
                parts.append(v)
            elif c == -1:
                parts.append(minus(v))
            else:
                parts.append(mul(num(c, Sort.INT if c.denominator == 1 and v.sort is Sort.INT else Sort.REAL), v))
        return le(add(*parts), bound)

    def render(self, space: Space) -> str:
        out = []
        for i in self.support:
            c, name = self.coeffs[i], space.numeric[i].name
            mag = abs(c)
            coef = "" if mag == 1 else f"{render_bound(mag)}*"
            if not out:
                out.append(("-" if c < 0 else "") + coef + name)
            else:
                out.append((" - " if c < 0 else " + ") + coef + name)
        return "".join(out)


def default_templates(space: Space) -> tuple:
    """``{+x_j, -x_j}`` and ``x_j - x_k`` for every ordered pair ``j != k``."""
    n = len(space.numeric)
    out = []
    for j in range(n):
        for sign in (1, -1):
            cs = [0] * n
            cs[j] = sign
            out.append(Template(tuple(cs)))
    for j in range(n):
        for k in range(n):
            if j != k:
                cs = [0] * n
                cs[j], cs[k] = 1, -1
                out.append(Template(tuple(cs)))
    return tuple(out)


@dataclass(frozen=True)
class TemplateElement:
    """``c[i]`` bounds template ``i``; ``None`` is bottom."""

    domain: "TemplateDomain" = field(compare=False, repr=False)
    c: tuple | None

    @property
    def is_bottom(self):
        return self.c is None

    def bound(self, template: Template):
        return self.c[self.domain.index[template]]

    def __str__(self):
        return self.domain.render(self)


@dataclass(frozen=True)
class TemplateDomain(Domain):
    space: Space
    templates: tuple = None
    index: dict = field(init=False, compare=False, repr=False)
    kind = "template"

    def __post_init__(self):
        ts = tuple(self.templates) if self.templates is not None else default_templates(self.space)
        n = len(self.space.numeric)
        for t in ts:
            if len(t.coeffs) != n:
                raise ValueError("template arity does not match the space")
        if len(set(ts)) != len(ts):
            raise ValueError("duplicate template")
        object.__setattr__(self, "templates", ts)
        object.__setattr__(self, "index", {t: i for i, t in enumerate(ts)})
        object.__setattr__(self, "_integral", tuple(t.integral(self.space) for t in ts))
        pairs = []
        for i, t in enumerate(ts):
            j = self.index.get(t.negated())
            if j is not None and i < j:
                pairs.append((i, j))
        object.__setattr__(self, "_pairs", tuple(pairs))

    def make(self, c) -> TemplateElement:
        c = tuple(floor_bound(x, integral) for x, integral in zip(c, self._integral))
        if len(c) != len(self.templates):
            raise ValueError("bound count does not match the template set")
        for i, j in self._pairs:
            if is_finite(c[i]) and is_finite(c[j]) and c[i] + c[j] < 0:
                return self.bottom()
        return TemplateElement(self, c)

    def bottom(self):
        return TemplateElement(self, None)

    def top(self):
        return TemplateElement(self, tuple(INF for _ in self.templates))

    def is_bottom(self, a):
        return a.c is None

    def leq(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return True
        if b.is_bottom:
            return False
        return all(x <= y for x, y in zip(a.c, b.c))

    def join(self, a, b):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        return TemplateElement(self, tuple(max(x, y) for x, y in zip(a.c, b.c)))

    def meet(self, a, b):
        self.check(a, b)
        if a.is_bottom or b.is_bottom:
            return self.bottom()
        return self.make(min(x, y) for x, y in zip(a.c, b.c))

    def widen(self, a, b, thresholds=()):
        self.check(a, b)
        if a.is_bottom:
            return b
        if b.is_bottom:
            return a
        ts = sorted_thresholds(thresholds)
        out = []
        for x, y, integral in zip(a.c, b.c, self._integral):
            out.append(x if y <= x else floor_bound(threshold_above(y, ts), integral))
        return TemplateElement(self, tuple(out))

    def alpha(self, state):
        nums, _ = self.space.split(state)
        return TemplateElement(self, tuple(
            int(v) if integral else v
            for v, integral in ((t.value(nums), i) for t, i in zip(self.templates, self._integral))
        ))

    def contains(self, a, state) -> bool:
        if a.is_bottom:
            return False
        nums, _ = self.space.split(state)
        return all(t.value(nums) <= c for t, c in zip(self.templates, a.c))

    def conjuncts(self, a):
        if a.is_bottom:
            return [FALSE]
        return [t.atom(self.space, c) for t, c in zip(self.templates, a.c) if is_finite(c)]

    def render(self, a):
        if a.is_bottom:
            return "bottom"
        parts = [f"{t.render(self.space)} <= {render_bound(c)}"
                 for t, c in zip(self.templates, a.c) if is_finite(c)]
        return "tpl[" + ", ".join(parts) + "]"

    def read_form(self, r: Reader) -> Template:
        names = {v.name: i for i, v in enumerate(self.space.numeric)}
        cs = [Fraction(0)] * len(names)
        sign = Fraction(-1) if r.accept("-") else Fraction(1)
        while True:
            r.ws()
            coef = Fraction(1)
            if r.text[r.pos:r.pos + 1].isdigit():
                coef = r.number()
                r.expect("*")
            name = r.ident()
            if name not in names:
                r.error(f"unknown numeric variable {name}")
            cs[names[name]] += sign * coef
            if r.accept("+"):
                sign = Fraction(1)
            elif r.peek("-") and not r.peek("-inf"):
                r.expect("-")
                sign = Fraction(-1)
            else:
                break
        return Template(tuple(cs))

    def read(self, r: Reader):
        if r.accept("bottom"):
            return self.bottom()
        r.expect("tpl[")
        c = [INF] * len(self.templates)
        first = True
        while not r.accept("]"):
            if not first:
                r.expect(",")
            first = False
            t = self.read_form(r)
            r.expect("<=")
            bound = r.bound()
            i = self.index.get(t)
            if i is None:
                r.error(f"template {t.render(self.space)} is not in this domain")
            c[i] = min(c[i], bound)
        return self.make(c)
