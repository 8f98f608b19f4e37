"""The native transition-system format.

::

    (ts (state (x Int) (b Bool))
        (input (a Bool))
        (init (and (= x 0) b))
        (trans (= x' (ite a (+ x 1) x))))

Primed names (``x'``) may only appear inside ``trans``. Rationals are written
``p/q`` and always denote Real constants.
"""

from __future__ import annotations

import re
from fractions import Fraction

from invstream.errors import DuplicateVariableError, ParseError, SortError
from invstream.frontend.sexpr import Atom, SList, parse_all
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
    render,
)

_INT = re.compile(r"^-?\d+$")
_RAT = re.compile(r"^-?\d+/\d+$")
_DEC = re.compile(r"^-?\d+\.\d+$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_.!]*$")

_OPS = {
    "not": "not",
    "and": "and",
    "or": "or",
    "=>": "=>",
    "=": "=",
    "<": "<",
    "<=": "<=",
    ">": ">",
    ">=": ">=",
    "+": "+",
    "*": "*",
    "ite": "ite",
}
_SORTS = {"Bool": Sort.BOOL, "Int": Sort.INT, "Real": Sort.REAL}


def _pos(node):
    return getattr(node, "line", None), getattr(node, "column", None)


def parse_sort(node) -> Sort:
    if isinstance(node, Atom) and str(node) in _SORTS:
        return _SORTS[str(node)]
    raise ParseError(f"unknown sort {node!s}", *_pos(node))


def parse_literal(text: str):
    """Return the constant denoted by an atom or ``None``."""
    if text == "true":
        return Const(True, Sort.BOOL)
    if text == "false":
        return Const(False, Sort.BOOL)
    if _INT.match(text):
        return Const(int(text), Sort.INT)
    if _RAT.match(text):
        p, q = text.split("/")
        if int(q) == 0:
            raise ParseError(f"zero denominator in {text}")
        return Const(Fraction(int(p), int(q)), Sort.REAL)
    if _DEC.match(text):
        return Const(Fraction(text), Sort.REAL)
    return None


def parse_term(node, env: dict, epochs=(CUR, PRIMED)) -> Term:
    """Build a term from an s-expression; ``env`` maps names to sorts."""
    if isinstance(node, Atom):
        text = str(node)
        lit = None if node.quoted else parse_literal(text)
        if lit is not None:
            return lit
        epoch = CUR
        name = text
        if text.endswith("'"):
            name, epoch = text[:-1], PRIMED
        elif "@" in text:
            name, _, idx = text.rpartition("@")
            if not idx.isdigit():
                raise ParseError(f"bad epoch in {text!r}", *_pos(node))
            epoch = int(idx)
        if name not in env:
            raise ParseError(f"unknown variable {name!r}", *_pos(node))
        if epoch not in epochs:
            raise ParseError(f"variable {text!r} not allowed here", *_pos(node))
        return Var(name, env[name], epoch)
    if not node:
        raise ParseError("empty application", *_pos(node))
    head = node[0]
    if not isinstance(head, Atom):
        raise ParseError("operator expected", *_pos(node))
    args = tuple(parse_term(a, env, epochs) for a in node[1:])
    op = str(head)
    if op == "-":
        op = "neg" if len(args) == 1 else "-"
    elif op in _OPS:
        op = _OPS[op]
    else:
        raise ParseError(f"unknown operator {op!r}", *_pos(head))
    try:
        t = App(op, args)
        t.sort
    except SortError as e:
        raise SortError(f"{node.line}:{node.column}: {e}") from None
    return t


def _parse_decls(node, kind, env, out):
    for item in node[1:]:
        if not (isinstance(item, SList) and len(item) == 2 and isinstance(item[0], Atom)):
            raise ParseError("declaration must be (name Sort)", *_pos(item))
        name = str(item[0])
        if not _IDENT.match(name) or parse_literal(name) is not None:
            raise ParseError(f"bad variable name {name!r}", *_pos(item))
        if name in env:
            raise DuplicateVariableError(f"duplicate variable {name!r}", *_pos(item))
        sort = parse_sort(item[1])
        env[name] = sort
        out.append(Variable(name, sort, kind))


def parse_native(text: str) -> TransitionSystem:
    items = parse_all(text)
    if len(items) != 1 or not isinstance(items[0], SList) or not items[0] or items[0][0] != "ts":
        raise ParseError("expected a single (ts ...) form", 1, 1)
    root = items[0]
    env, variables = {}, []
    sections = {}
    for sec in root[1:]:
        if not isinstance(sec, SList) or not sec or not isinstance(sec[0], Atom):
            raise ParseError("section expected", *_pos(sec))
        name = str(sec[0])
        if name not in ("state", "input", "init", "trans"):
            raise ParseError(f"unknown section {name!r}", *_pos(sec))
        if name in ("state", "input"):
            _parse_decls(sec, name, env, variables)
            continue
        if name in sections:
            raise ParseError(f"duplicate section {name!r}", *_pos(sec))
        sections[name] = sec
    for name in ("init", "trans"):
        if name not in sections:
            raise ParseError(f"missing section {name!r}", *_pos(root))
        if len(sections[name]) != 2:
            raise ParseError(f"{name} takes one formula", *_pos(sections[name]))
    init = parse_term(sections["init"][1], env, (CUR,))
    trans = parse_term(sections["trans"][1], env, (CUR, PRIMED))
    for what, t, node in (("init", init, sections["init"]), ("trans", trans, sections["trans"])):
        if t.sort is not Sort.BOOL:
            raise SortError(f"{node.line}:{node.column}: {what} is not Bool", t)
    return make_system(variables, init, trans)


def parse_formula(text: str, variables, epochs=(CUR,)) -> Term:
    """Parse one s-expression formula over the given variables."""
    items = parse_all(text)
    if len(items) != 1:
        raise ParseError("expected one formula")
    env = {v.name: v.sort for v in variables}
    return parse_term(items[0], env, epochs)


def print_native(ts: TransitionSystem) -> str:
    # one section per run of equal kinds keeps the variable order intact
    runs = []
    for v in ts.vars:
        kind = "input" if v.kind == "input" else "state"
        if runs and runs[-1][0] == kind:
            runs[-1][1].append(v)
        else:
            runs.append((kind, [v]))
    lines = ["(ts"]
    for kind, vs in runs:
        decls = " ".join(f"({v.name} {v.sort})" for v in vs)
        lines.append(f"    ({kind} {decls})")
    lines.append(f"    (init {render(ts.init)})")
    lines.append(f"    (trans {render(ts.trans)}))")
    return "\n".join(lines) + "\n"
