"""Boolean partitioning: one sub-element per valuation of a predicate list."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as valuations

from invstream.domains.base import Domain, Reader
from invstream.errors import DomainMismatchError, ParseError
from invstream.frontend.native import parse_formula
from invstream.frontend.terms import CUR, FALSE, Sort, conj, free_vars, implies, neg, render
from invstream.solver.evaluator import eval_term

MAX_PREDICATES = 8


@dataclass(frozen=True)
class PartitionElement:
    """``cells[i]`` is the sub-element for valuation ``domain.valuations[i]``."""

    domain: "PartitionDomain" = field(compare=False, repr=False)
    cells: tuple

    @property
    def is_bottom(self):
        return all(c.is_bottom for c in self.cells)

    def cell(self, valuation) -> object:
        return self.cells[self.domain.valuations.index(tuple(valuation))]

    def __str__(self):
        return self.domain.render(self)


@dataclass(frozen=True)
class PartitionDomain(Domain):
    base: Domain
    predicates: tuple
    kind = "partition"

    def __post_init__(self):
        preds = tuple(self.predicates)
        if not preds:
            raise ValueError("a partition needs at least one predicate")
        if len(preds) > MAX_PREDICATES:
            raise ValueError(f"at most {MAX_PREDICATES} partition predicates are supported")
        names = {v.name: v.sort for v in self.base.space.variables}
        for p in preds:
            if p.sort is not Sort.BOOL:
                raise ValueError(f"partition predicate {render(p)} is not Bool")
            for v in free_vars(p):
                if v.epoch != CUR or names.get(v.name) != v.sort:
                    raise ValueError(f"partition predicate {render(p)} mentions {v.name} outside the state")
        object.__setattr__(self, "predicates", preds)
        vals = tuple(tuple(bits) for bits in valuations((True, False), repeat=len(preds)))
        object.__setattr__(self, "valuations", vals)
        object.__setattr__(self, "guards", tuple(self._guard(v) for v in vals))

    @property
    def space(self):
        return self.base.space

    def _guard(self, valuation):
        return conj(*(p if b else neg(p) for p, b in zip(self.predicates, valuation)))

    def bottom(self):
        return PartitionElement(self, tuple(self.base.bottom() for _ in self.valuations))

    def top(self):
        return PartitionElement(self, tuple(self.base.top() for _ in self.valuations))

    def is_bottom(self, a):
        return a.is_bottom

    def _cellwise(self, op, a, b, *extra):
        self.check(a, b)
        return PartitionElement(self, tuple(op(x, y, *extra) for x, y in zip(a.cells, b.cells)))

    def leq(self, a, b):
        self.check(a, b)
        return all(self.base.leq(x, y) for x, y in zip(a.cells, b.cells))

    def join(self, a, b):
        return self._cellwise(self.base.join, a, b)

    def meet(self, a, b):
        return self._cellwise(self.base.meet, a, b)

    def widen(self, a, b, thresholds=()):
        return self._cellwise(self.base.widen, a, b, thresholds)

    def valuation(self, state) -> tuple:
        env = self.space.env(state)
        return tuple(bool(eval_term(p, env)) for p in self.predicates)

    def alpha(self, state):
        where = self.valuations.index(self.valuation(state))
        point = self.base.alpha(state)
        return PartitionElement(self, tuple(
            point if i == where else self.base.bottom() for i in range(len(self.valuations))
        ))

    def contains(self, a, state) -> bool:
        return self.base.contains(a.cell(self.valuation(state)), state)

    def flatten(self, a):
        """Join of all cells, as an element of the base domain."""
        out = self.base.bottom()
        for c in a.cells:
            out = self.base.join(out, c)
        return out

    def conjuncts(self, a):
        """Facts shared by all cells unguarded, then per-cell guarded facts.

        Logically equal to the conjunction over cells of ``guard => gamma(cell)``:
        the unguarded part is implied since exactly one guard holds in any state.
        """
        if a.is_bottom:
            return [FALSE]
        common = self.base.conjuncts(self.flatten(a))
        out = list(common)
        seen = set(common)
        for guard, cell in zip(self.guards, a.cells):
            if cell.is_bottom:
                c = implies(guard, FALSE)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
                continue
            for atom in self.base.conjuncts(cell):
                if atom in seen:
                    continue
                c = implies(guard, atom)
                if c not in seen:
                    seen.add(c)
                    out.append(c)
        return out

    def render(self, a):
        preds = "; ".join(render(p) for p in self.predicates)
        cells = ", ".join(
            "".join("1" if b else "0" for b in v) + ": " + self.base.render(c)
            for v, c in zip(self.valuations, a.cells)
        )
        return f"part[{preds}]{{{cells}}}"

    def read(self, r: Reader):
        r.expect("part[")
        preds = []
        while not r.accept("]"):
            if preds:
                r.expect(";")
            text = r.sexpr()
            try:
                preds.append(parse_formula(text, self.space.variables))
            except ParseError as e:
                r.error(f"bad partition predicate: {e}")
        if tuple(preds) != self.predicates:
            raise DomainMismatchError("partition predicates differ from the domain's")
        r.expect("{")
        cells = {}
        while not r.accept("}"):
            if cells:
                r.expect(",")
            r.ws()
            start = r.pos
            while r.pos < len(r.text) and r.text[r.pos] in "01":
                r.pos += 1
            key = tuple(ch == "1" for ch in r.text[start:r.pos])
            if key not in self.valuations or key in cells:
                r.error("bad or repeated cell key")
            r.expect(":")
            cells[key] = self.base.read(r)
        return PartitionElement(self, tuple(cells.get(v, self.base.bottom()) for v in self.valuations))
