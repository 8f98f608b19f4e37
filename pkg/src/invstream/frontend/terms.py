"""Sorted terms over Bool, Int and Real.

Terms are immutable trees. Variable references carry an *epoch*: ``CUR`` for
the current state, ``PRIMED`` for the successor state and a non-negative
integer for the copies used by unrollings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from invstream.errors import NonlinearError, SortError, UnboundVariableError

Value = Union[bool, int, Fraction]
Epoch = Union[str, int]

CUR = "cur"
PRIMED = "primed"


class Sort(enum.Enum):
    BOOL = "Bool"
    INT = "Int"
    REAL = "Real"

    @property
    def is_numeric(self):
        return self is not Sort.BOOL

    def __str__(self):
        return self.value


def numeric_lub(a: Sort, b: Sort) -> Sort:
    return Sort.REAL if Sort.REAL in (a, b) else Sort.INT


@dataclass(frozen=True)
class Variable:
    """A declared system variable; ``kind`` is ``"state"`` or ``"input"``."""

    name: str
    sort: Sort
    kind: str = "state"

    def at(self, epoch: Epoch = CUR) -> "Var":
        return Var(self.name, self.sort, epoch)


class Term:
    """Base class; every term exposes a ``sort``."""

    def __str__(self):
        return render(self)


@dataclass(frozen=True, repr=False)
class Const(Term):
    value: Value
    sort: Sort

    def __hash__(self):
        return hash((self.value, self.sort))

    def __repr__(self):
        return f"Const({render(self)})"


@dataclass(frozen=True, repr=False)
class Var(Term):
    name: str
    sort: Sort
    epoch: Epoch = CUR

    def __hash__(self):
        return hash((self.name, self.epoch))

    @property
    def key(self):
        return (self.name, self.epoch)

    def __repr__(self):
        return f"Var({render(self)})"


OPS = frozenset(
    ["not", "and", "or", "=>", "=", "<", "<=", ">", ">=", "+", "-", "neg", "*", "ite"]
)
COMPARISONS = frozenset(["<", "<=", ">", ">="])


@dataclass(frozen=True, repr=False)
class App(Term):
    op: str
    args: tuple

    def __post_init__(self):
        if self.op not in OPS:
            raise SortError(f"unknown operator {self.op!r}")
        object.__setattr__(self, "_hash", hash((self.op, self.args)))
        object.__setattr__(self, "_sort", None)

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, App) or self._hash != other._hash:
            return False
        return self.op == other.op and self.args == other.args

    @property
    def sort(self) -> Sort:
        if self._sort is None:
            object.__setattr__(self, "_sort", _app_sort(self))
        return self._sort

    def __repr__(self):
        return f"App({render(self)})"


def is_closed(t: Term) -> bool:
    """True when ``t`` mentions no variables."""
    if isinstance(t, Var):
        return False
    if isinstance(t, App):
        return all(is_closed(a) for a in t.args)
    inner = getattr(t, "operand_terms", None)
    if inner is not None:
        return all(is_closed(a) for a in inner())
    return True


def _app_sort(t: App) -> Sort:
    op, args = t.op, t.args
    sorts = [a.sort for a in args]

    def need(n):
        if len(args) != n:
            raise SortError(f"{op} expects {n} argument(s)", t)

    if op in ("not", "and", "or", "=>"):
        if op == "not":
            need(1)
        elif op == "=>":
            need(2)
        elif not args:
            raise SortError(f"{op} expects arguments", t)
        if any(s is not Sort.BOOL for s in sorts):
            raise SortError(f"{op} expects Bool operands", t)
        return Sort.BOOL
    if op == "=":
        need(2)
        a, b = sorts
        if a != b and not (a.is_numeric and b.is_numeric):
            raise SortError("= between incompatible sorts", t)
        return Sort.BOOL
    if op in COMPARISONS:
        need(2)
        if not all(s.is_numeric for s in sorts):
            raise SortError(f"{op} expects numeric operands", t)
        return Sort.BOOL
    if op in ("+", "-", "neg", "*"):
        if op == "neg":
            need(1)
        elif op in ("-", "*"):
            need(2)
        elif not args:
            raise SortError("+ expects arguments", t)
        if not all(s.is_numeric for s in sorts):
            raise SortError(f"{op} expects numeric operands", t)
        if op == "*" and not (is_closed(args[0]) or is_closed(args[1])):
            raise NonlinearError("product of two non-constant terms", t)
        result = Sort.INT
        for s in sorts:
            result = numeric_lub(result, s)
        return result
    if op == "ite":
        need(3)
        c, a, b = sorts
        if c is not Sort.BOOL:
            raise SortError("ite condition must be Bool", t)
        if a == b:
            return a
        if a.is_numeric and b.is_numeric:
            return numeric_lub(a, b)
        raise SortError("ite branches of incompatible sorts", t)
    raise SortError(f"unknown operator {op!r}", t)


def typecheck(t: Term, variables: Iterable[Variable] | None = None) -> Sort:
    """Return the sort of ``t``.

    When ``variables`` is given, every variable reference must resolve to a
    declared variable of the same sort.
    """
    if variables is not None:
        declared = {v.name: v.sort for v in variables}
        for v in free_vars(t):
            if v.name not in declared:
                raise UnboundVariableError("unbound variable", v)
            if declared[v.name] != v.sort:
                raise SortError(f"variable declared {declared[v.name]}", v)
    return _deep_sort(t)


def _deep_sort(t: Term) -> Sort:
    # force evaluation bottom-up so nested errors name the innermost subterm
    if isinstance(t, App):
        for a in t.args:
            _deep_sort(a)
    return t.sort


# -- constructors ----------------------------------------------------------

TRUE = Const(True, Sort.BOOL)
FALSE = Const(False, Sort.BOOL)


def num(value, sort: Sort | None = None) -> Const:
    """Numeric constant; ints become Int and everything else an exact Real."""
    if isinstance(value, bool):
        raise SortError(f"not a number: {value!r}")
    if sort is None:
        sort = Sort.INT if isinstance(value, int) else Sort.REAL
    if sort is Sort.INT:
        f = Fraction(value)
        if f.denominator != 1:
            raise SortError(f"non-integral Int constant {value}")
        return Const(int(f), Sort.INT)
    return Const(Fraction(value), Sort.REAL)


def const(value: Value, sort: Sort | None = None) -> Const:
    if isinstance(value, bool):
        return TRUE if value else FALSE
    return num(value, sort)


def conj(*terms: Term) -> Term:
    out = []
    for t in terms:
        if t == TRUE:
            continue
        if t == FALSE:
            return FALSE
        if isinstance(t, App) and t.op == "and":
            out.extend(t.args)
        else:
            out.append(t)
    if not out:
        return TRUE
    if len(out) == 1:
        return out[0]
    return App("and", tuple(out))


def disj(*terms: Term) -> Term:
    out = []
    for t in terms:
        if t == FALSE:
            continue
        if t == TRUE:
            return TRUE
        if isinstance(t, App) and t.op == "or":
            out.extend(t.args)
        else:
            out.append(t)
    if not out:
        return FALSE
    if len(out) == 1:
        return out[0]
    return App("or", tuple(out))


def neg(t: Term) -> Term:
    if t == TRUE:
        return FALSE
    if t == FALSE:
        return TRUE
    if isinstance(t, App) and t.op == "not":
        return t.args[0]
    return App("not", (t,))


def implies(a: Term, b: Term) -> Term:
    if a == TRUE:
        return b
    if a == FALSE or b == TRUE:
        return TRUE
    if b == FALSE:
        return neg(a)
    return App("=>", (a, b))


def eq(a: Term, b: Term) -> Term:
    return App("=", (a, b))


def lt(a, b):
    return App("<", (a, b))


def le(a, b):
    return App("<=", (a, b))


def gt(a, b):
    return App(">", (a, b))


def ge(a, b):
    return App(">=", (a, b))


def add(*terms):
    return terms[0] if len(terms) == 1 else App("+", tuple(terms))


def sub(a, b):
    return App("-", (a, b))


def minus(a):
    return App("neg", (a,))


def mul(a, b):
    return App("*", (a, b))


def ite(c, a, b):
    return App("ite", (c, a, b))


# -- traversal ---------------------------------------------------------------


def free_vars(t: Term) -> set:
    out = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Var):
            out.add(cur)
        elif isinstance(cur, App):
            stack.extend(cur.args)
        else:
            inner = getattr(cur, "operand_terms", None)
            if inner is not None:
                stack.extend(inner())
    return out


def constants(t: Term) -> set:
    """Numeric constants occurring in ``t`` (as exact rationals)."""
    out = set()
    stack = [t]
    while stack:
        cur = stack.pop()
        if isinstance(cur, Const):
            if cur.sort.is_numeric:
                out.add(Fraction(cur.value))
        elif isinstance(cur, App):
            stack.extend(cur.args)
        else:
            inner = getattr(cur, "operand_terms", None)
            if inner is not None:
                stack.extend(inner())
    return out


def size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(size(a) for a in t.args)
    return 1


def substitute(t: Term, mapping: Mapping) -> Term:
    """Simultaneously replace variables keyed by ``(name, epoch)``."""
    if not mapping:
        return t
    for key, repl in mapping.items():
        if not isinstance(repl, Term):
            raise SortError(f"replacement for {key} is not a term")
    memo = {}

    def go(u):
        if isinstance(u, Var):
            r = mapping.get(u.key)
            if r is None:
                return u
            if r.sort != u.sort and not (u.sort is Sort.REAL and r.sort is Sort.INT):
                raise SortError(f"cannot substitute {r.sort} term for", u)
            return r
        if isinstance(u, App):
            got = memo.get(id(u))
            if got is None:
                new_args = tuple(go(a) for a in u.args)
                got = u if new_args == u.args else App(u.op, new_args)
                memo[id(u)] = got
            return got
        return u

    return go(t)


def retime(t: Term, shift: Mapping[Epoch, Epoch]) -> Term:
    """Rename epochs of every variable according to ``shift``."""
    mapping = {v.key: Var(v.name, v.sort, shift[v.epoch]) for v in free_vars(t) if v.epoch in shift}
    return substitute(t, mapping)


def prime(t: Term) -> Term:
    return retime(t, {CUR: PRIMED})


def at_step(t: Term, i: int) -> Term:
    """Map current to copy ``i`` and primed to copy ``i + 1``."""
    return retime(t, {CUR: i, PRIMED: i + 1})


def top_conjuncts(t: Term) -> list:
    if isinstance(t, App) and t.op == "and":
        out = []
        for a in t.args:
            out.extend(top_conjuncts(a))
        return out
    if t == TRUE:
        return []
    return [t]


# -- rendering ---------------------------------------------------------------


def render_value(v: Value, sort: Sort | None = None) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    f = Fraction(v)
    if sort is Sort.REAL or (sort is None and isinstance(v, Fraction)):
        return f"{f.numerator}/{f.denominator}"
    return str(f.numerator)


def render_var(name: str, epoch: Epoch) -> str:
    if epoch == CUR:
        return name
    if epoch == PRIMED:
        return name + "'"
    return f"{name}@{epoch}"


_RENDER_OP = {"neg": "-"}


def render(t: Term) -> str:
    """Native s-expression text of a term."""
    if isinstance(t, Const):
        return render_value(t.value, t.sort)
    if isinstance(t, Var):
        return render_var(t.name, t.epoch)
    if isinstance(t, App):
        op = _RENDER_OP.get(t.op, t.op)
        return "(" + " ".join([op] + [render(a) for a in t.args]) + ")"
    return repr(t)
