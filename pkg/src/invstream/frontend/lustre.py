"""A single-node Lustre subset and its translation to transition systems.

Supported: ``node``/``returns``/``var``/``let``/``tel``, ``pre``, ``->``,
``if/then/else``, ``and or xor not implies =>``, comparisons and linear
arithmetic over ``bool``, ``int`` and ``real`` streams.

The translation uses a current-state encoding with a Bool flag ``__init``:
``init`` evaluates every equation at its first instant, ``trans`` evaluates it
at the primed epoch where ``pre s`` reads the unprimed copy of ``s``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from invstream.errors import LustreError, ParseError, SortError, TranslationError
from invstream.frontend.system import TransitionSystem, make_system
from invstream.frontend.terms import (
    CUR,
    PRIMED,
    App,
    Const,
    Sort,
    Term,
    Var,
    Variable,
    conj,
    ite,
    neg,
    numeric_lub,
)

INIT_FLAG = "__init"

_KEYWORDS = {
    "node", "returns", "var", "let", "tel", "pre", "if", "then", "else",
    "and", "or", "xor", "not", "implies", "true", "false", "bool", "int", "real",
}
_UNSUPPORTED = {
    "when", "current", "fby", "merge", "div", "mod", "const", "type",
    "function", "assert", "include", "every", "restart",
}
_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*|\(\*.*?\*\)|/\*.*?\*/)
  | (?P<num>\d+\.\d*|\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|<=|>=|<>|=>|[=<>+\-*/(),:;.^\[\]{}|])
    """,
    re.VERBOSE | re.DOTALL,
)
_TYPES = {"bool": Sort.BOOL, "int": Sort.INT, "real": Sort.REAL}


@dataclass(frozen=True)
class Pre(Term):
    """``pre e``: the value of ``e`` at the previous instant."""

    operand: Term

    @property
    def sort(self):
        return self.operand.sort

    def operand_terms(self):
        return (self.operand,)

    def __str__(self):
        return f"(pre {self.operand})"


@dataclass(frozen=True)
class Arrow(Term):
    """``first -> rest``."""

    first: Term
    rest: Term

    @property
    def sort(self):
        a, b = self.first.sort, self.rest.sort
        if a == b:
            return a
        if a.is_numeric and b.is_numeric:
            return numeric_lub(a, b)
        raise SortError("-> operands of incompatible sorts", self)

    def operand_terms(self):
        return (self.first, self.rest)

    def __str__(self):
        return f"(-> {self.first} {self.rest})"


@dataclass
class LustreProgram:
    name: str
    inputs: list
    outputs: list
    locals: list
    equations: dict = field(default_factory=dict)

    @property
    def streams(self) -> list:
        return self.inputs + self.outputs + self.locals

    def stream(self, name) -> Variable:
        for v in self.streams:
            if v.name == name:
                return v
        raise KeyError(name)


class _Lexer:
    def __init__(self, text):
        self.toks = []
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            value = m.group()
            if kind not in ("ws", "comment"):
                self.toks.append((kind, value, line, m.start() - line_start + 1))
            nl = value.count("\n")
            if nl:
                line += nl
                line_start = m.start() + value.rindex("\n") + 1
            pos = m.end()
        self.toks.append(("eof", "", line, pos - line_start + 1))
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i = min(self.i + 1, len(self.toks) - 1)
        return tok

    def at(self, value):
        kind, v, _, _ = self.peek()
        return v == value and kind in ("op", "ident")

    def accept(self, value):
        if self.at(value):
            return self.next()
        return None

    def expect(self, value):
        tok = self.next()
        if tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        return tok

    def ident(self):
        kind, v, line, col = self.next()
        if kind != "ident" or v in _KEYWORDS:
            if v in _UNSUPPORTED:
                raise LustreError(f"unsupported construct {v!r}", line, col)
            raise ParseError(f"identifier expected, found {v or 'end of input'!r}", line, col)
        if v in _UNSUPPORTED:
            raise LustreError(f"unsupported construct {v!r}", line, col)
        return v, line, col


class _Parser:
    def __init__(self, text, env=None):
        self.lx = _Lexer(text)
        self.env = env if env is not None else {}

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.lx.peek()
        return cls(msg, tok[2], tok[3])

    # declarations
    def decl_groups(self, closer):
        out = []
        while not self.lx.at(closer):
            names = [self.lx.ident()[0]]
            while self.lx.accept(","):
                names.append(self.lx.ident()[0])
            self.lx.expect(":")
            kind, tname, line, col = self.lx.next()
            if tname not in _TYPES:
                raise ParseError(f"unknown type {tname!r}", line, col)
            out.extend((n, _TYPES[tname]) for n in names)
            if not self.lx.accept(";"):
                break
        return out

    def program(self) -> LustreProgram:
        lx = self.lx
        if not lx.at("node"):
            kind, v, line, col = lx.peek()
            if v in _UNSUPPORTED:
                raise LustreError(f"unsupported construct {v!r}", line, col)
            raise self.error("expected 'node'")
        lx.next()
        name, _, _ = lx.ident()
        lx.expect("(")
        ins = self.decl_groups(")")
        lx.expect(")")
        lx.expect("returns")
        lx.expect("(")
        outs = self.decl_groups(")")
        lx.expect(")")
        lx.accept(";")
        locs = []
        if lx.accept("var"):
            while lx.peek()[0] == "ident" and not lx.at("let"):
                names = [lx.ident()[0]]
                while lx.accept(","):
                    names.append(lx.ident()[0])
                lx.expect(":")
                kind, tname, line, col = lx.next()
                if tname not in _TYPES:
                    raise ParseError(f"unknown type {tname!r}", line, col)
                locs.extend((n, _TYPES[tname]) for n in names)
                lx.expect(";")
        lx.expect("let")
        seen = set()
        decls = []
        for group, kind in ((ins, "input"), (outs, "state"), (locs, "state")):
            vs = []
            for n, s in group:
                if n in seen:
                    raise LustreError(f"stream {n!r} declared twice")
                seen.add(n)
                vs.append(Variable(n, s, kind))
            decls.append(vs)
        prog = LustreProgram(name, decls[0], decls[1], decls[2])
        self.env = {v.name: v.sort for v in prog.streams}
        inputs = {v.name for v in prog.inputs}
        while not lx.at("tel"):
            tok = lx.peek()
            if tok[0] == "eof":
                raise self.error("expected 'tel'")
            target, line, col = lx.ident()
            if target not in self.env:
                raise LustreError(f"undefined stream {target!r}", line, col)
            if target in inputs:
                raise LustreError(f"input {target!r} cannot be defined", line, col)
            if target in prog.equations:
                raise LustreError(f"stream {target!r} defined twice", line, col)
            lx.expect("=")
            rhs = self.expr()
            lx.expect(";")
            try:
                rsort = rhs.sort
            except SortError as e:
                raise SortError(f"{line}:{col}: {e}") from None
            lsort = self.env[target]
            if not (rsort == lsort or (lsort is Sort.REAL and rsort is Sort.INT)):
                raise SortError(f"{line}:{col}: {target} has sort {lsort} but is defined by {rsort}", rhs)
            prog.equations[target] = rhs
        lx.expect("tel")
        lx.accept(";") or lx.accept(".")
        if lx.peek()[0] != "eof":
            tok = lx.peek()
            if tok[1] == "node":
                raise LustreError("only one node is supported", tok[2], tok[3])
            raise self.error(f"unexpected {tok[1]!r}")
        for v in prog.outputs + prog.locals:
            if v.name not in prog.equations:
                raise LustreError(f"stream {v.name!r} has no equation")
        check_acyclic(prog)
        return prog

    # expressions, loosest first
    def expr(self, guarded=False, in_pre=False):
        return self.arrow(guarded, in_pre)

    def arrow(self, g, p):
        left = self.impl(g, p)
        if self.lx.accept("->"):
            right = self.arrow(True, p)
            return Arrow(left, right)
        return left

    def impl(self, g, p):
        left = self.disj(g, p)
        if self.lx.at("=>") or self.lx.at("implies"):
            self.lx.next()
            right = self.impl(g, p)
            return App("=>", (left, right))
        return left

    def disj(self, g, p):
        left = self.conj(g, p)
        while self.lx.at("or") or self.lx.at("xor"):
            op = self.lx.next()[1]
            right = self.conj(g, p)
            if op == "or":
                left = App("or", (left, right))
            else:
                left = App("not", (App("=", (left, right)),))
        return left

    def conj(self, g, p):
        left = self.negation(g, p)
        while self.lx.accept("and"):
            left = App("and", (left, self.negation(g, p)))
        return left

    def negation(self, g, p):
        if self.lx.accept("not"):
            return App("not", (self.negation(g, p),))
        return self.comparison(g, p)

    def comparison(self, g, p):
        left = self.additive(g, p)
        tok = self.lx.peek()
        if tok[0] == "op" and tok[1] in ("=", "<>", "<", "<=", ">", ">="):
            self.lx.next()
            right = self.additive(g, p)
            if tok[1] == "<>":
                return App("not", (App("=", (left, right)),))
            return App(tok[1], (left, right))
        return left

    def additive(self, g, p):
        left = self.multiplicative(g, p)
        while True:
            tok = self.lx.peek()
            if tok[0] == "op" and tok[1] in ("+", "-"):
                self.lx.next()
                right = self.multiplicative(g, p)
                if tok[1] == "+":
                    left = App("+", (left, right))
                else:
                    left = App("-", (left, right))
            else:
                return left

    def multiplicative(self, g, p):
        left = self.unary(g, p)
        while True:
            tok = self.lx.peek()
            if tok[0] == "op" and tok[1] in ("*", "/"):
                if tok[1] == "/":
                    raise LustreError("unsupported construct '/'", tok[2], tok[3])
                self.lx.next()
                right = self.unary(g, p)
                try:
                    left = App("*", (left, right))
                    left.sort
                except SortError as e:
                    raise type(e)(f"{tok[2]}:{tok[3]}: {e}") from None
            else:
                return left

    def unary(self, g, p):
        tok = self.lx.peek()
        if tok[1] == "-" and tok[0] == "op":
            self.lx.next()
            operand = self.unary(g, p)
            if isinstance(operand, Const) and operand.sort.is_numeric:
                return Const(-operand.value, operand.sort)
            return App("neg", (operand,))
        if tok[1] == "pre" and tok[0] == "ident":
            self.lx.next()
            if p:
                raise LustreError("unsupported construct: nested 'pre'", tok[2], tok[3])
            if not g:
                raise LustreError("'pre' outside the right operand of '->'", tok[2], tok[3])
            return Pre(self.unary(g, True))
        return self.atom(g, p)

    def atom(self, g, p):
        kind, v, line, col = self.lx.next()
        if kind == "num":
            if "." in v:
                return Const(Fraction(v if not v.endswith(".") else v[:-1]), Sort.REAL)
            return Const(int(v), Sort.INT)
        if v == "(" and kind == "op":
            e = self.expr(g, p)
            if self.lx.at(","):
                tok = self.lx.peek()
                raise LustreError("unsupported construct: tuple", tok[2], tok[3])
            self.lx.expect(")")
            return e
        if kind == "ident":
            if v in ("true", "false"):
                return Const(v == "true", Sort.BOOL)
            if v == "if":
                c = self.expr(g, p)
                self.lx.expect("then")
                a = self.expr(g, p)
                self.lx.expect("else")
                b = self.expr(g, p)
                return App("ite", (c, a, b))
            if v in _UNSUPPORTED:
                raise LustreError(f"unsupported construct {v!r}", line, col)
            if v in _KEYWORDS:
                raise ParseError(f"unexpected keyword {v!r}", line, col)
            if self.lx.at("("):
                raise LustreError(f"unsupported construct: node call {v!r}", line, col)
            if v not in self.env:
                raise LustreError(f"undefined stream {v!r}", line, col)
            return Var(v, self.env[v], CUR)
        if kind == "eof":
            raise ParseError("unexpected end of input", line, col)
        raise ParseError(f"unexpected {v!r}", line, col)


def _instant_refs(e, out):
    """Stream names read at the same instant (not under ``pre``)."""
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, Pre):
        return
    elif isinstance(e, App):
        for a in e.args:
            _instant_refs(a, out)
    elif isinstance(e, Arrow):
        _instant_refs(e.first, out)
        _instant_refs(e.rest, out)


def dependencies(prog: LustreProgram) -> dict:
    deps = {}
    for name, e in prog.equations.items():
        refs = set()
        _instant_refs(e, refs)
        deps[name] = {r for r in refs if r in prog.equations}
    return deps


def check_acyclic(prog: LustreProgram) -> list:
    """Topological order of defined streams; raises on a circular definition."""
    deps = dependencies(prog)
    order, state = [], {}

    def visit(n, path):
        st = state.get(n)
        if st == 2:
            return
        if st == 1:
            cycle = path[path.index(n):] + [n]
            raise LustreError("circular definition: " + " -> ".join(cycle))
        state[n] = 1
        for d in sorted(deps[n]):
            visit(d, path + [n])
        state[n] = 2
        order.append(n)

    for n in prog.equations:
        visit(n, [])
    return order


def parse_lustre(text: str) -> LustreProgram:
    return _Parser(text).program()


def parse_expression(text: str, variables) -> Term:
    """Parse an infix formula (e.g. a partition predicate) over current-epoch variables."""
    p = _Parser(text, {v.name: v.sort for v in variables})
    e = p.expr()
    tok = p.lx.peek()
    if tok[0] != "eof":
        raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
    e.sort
    return e


# -- translation ------------------------------------------------------------

FIRST, STEP, PREV = "first", "step", "prev"


def _translate_expr(e, mode, init_flag):
    if isinstance(e, Var):
        return Var(e.name, e.sort, PRIMED if mode == STEP else CUR)
    if isinstance(e, Const):
        return e
    if isinstance(e, Arrow):
        if mode == FIRST:
            return _translate_expr(e.first, mode, init_flag)
        if mode == STEP:
            return _translate_expr(e.rest, mode, init_flag)
        return ite(init_flag, _translate_expr(e.first, mode, init_flag),
                   _translate_expr(e.rest, mode, init_flag))
    if isinstance(e, Pre):
        if mode == FIRST:
            raise TranslationError(f"'pre' reachable at the first instant: {e}")
        if mode == PREV:
            raise TranslationError(f"nested 'pre' is not supported: {e}")
        return _translate_expr(e.operand, PREV, init_flag)
    if isinstance(e, App):
        return App(e.op, tuple(_translate_expr(a, mode, init_flag) for a in e.args))
    raise TranslationError(f"cannot translate {e!r}")


def translate(prog: LustreProgram) -> TransitionSystem:
    names = {v.name for v in prog.streams}
    if INIT_FLAG in names:
        raise TranslationError(f"stream name {INIT_FLAG!r} is reserved")
    flag = Variable(INIT_FLAG, Sort.BOOL, "state")
    flag_cur = flag.at(CUR)
    variables = list(prog.inputs) + list(prog.outputs) + list(prog.locals) + [flag]
    init_parts = [flag_cur]
    trans_parts = [neg(flag.at(PRIMED))]
    for v in prog.outputs + prog.locals:
        e = prog.equations[v.name]
        init_parts.append(App("=", (v.at(CUR), _translate_expr(e, FIRST, flag_cur))))
        trans_parts.append(App("=", (v.at(PRIMED), _translate_expr(e, STEP, flag_cur))))
    return make_system(variables, conj(*init_parts), conj(*trans_parts))
