"""Common interface of abstract domains and a small reader for element text."""

from __future__ import annotations

import re
from fractions import Fraction

from invstream.domains.bounds import INF, NEG_INF
from invstream.errors import DomainMismatchError, ParseError
from invstream.frontend.terms import Term, conj


class Domain:
    """An abstract lattice over a :class:`Space`.

    Elements carry a reference to their domain; the module level functions in
    :mod:`invstream.domains` dispatch through it.
    """

    kind = "abstract"

    def bottom(self):
        raise NotImplementedError

    def top(self):
        raise NotImplementedError

    def is_bottom(self, a) -> bool:
        raise NotImplementedError

    def leq(self, a, b) -> bool:
        raise NotImplementedError

    def join(self, a, b):
        raise NotImplementedError

    def meet(self, a, b):
        raise NotImplementedError

    def widen(self, a, b, thresholds=()):
        raise NotImplementedError

    def alpha(self, state):
        raise NotImplementedError

    def conjuncts(self, a) -> list:
        raise NotImplementedError

    def gamma(self, a) -> Term:
        return conj(*self.conjuncts(a))

    def render(self, a) -> str:
        raise NotImplementedError

    def read(self, r: "Reader"):
        raise NotImplementedError

    def parse(self, text: str):
        r = Reader(text)
        a = self.read(r)
        r.end()
        return a

    def check(self, *elements):
        for e in elements:
            if e.domain is not self and e.domain != self:
                raise DomainMismatchError(
                    f"element of {e.domain.kind} domain used with {self.kind} domain"
                )


_NUM = re.compile(r"-?\d+(?:/\d+)?")
_IDENT = re.compile(r"[A-Za-z_][\w']*")


class Reader:
    """Character-level cursor used by the element parsers."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(f"{msg} at offset {self.pos} in element text")

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.error(f"expected {s!r}")

    def number(self) -> Fraction:
        self.ws()
        m = _NUM.match(self.text, self.pos)
        if not m:
            self.error("expected a number")
        self.pos = m.end()
        return Fraction(m.group())

    def bound(self):
        if self.accept("+inf") or self.accept("inf"):
            return INF
        if self.accept("-inf"):
            return NEG_INF
        return self.number()

    def ident(self) -> str:
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            self.error("expected a name")
        self.pos = m.end()
        return m.group()

    def sexpr(self) -> str:
        """Raw text of one balanced parenthesized expression or atom."""
        self.ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] == "(":
            depth = 0
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                self.pos += 1
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        return self.text[start:self.pos]
            self.error("unbalanced parentheses")
        while self.pos < len(self.text) and not self.text[self.pos].isspace() and self.text[self.pos] not in ";]":
            self.pos += 1
        if self.pos == start:
            self.error("expected a formula")
        return self.text[start:self.pos]

    def end(self):
        self.ws()
        if self.pos != len(self.text):
            self.error("trailing text")
