"""SMT-LIB 2 rendering of terms and parsing of solver values."""

from __future__ import annotations

import re
from fractions import Fraction

from invstream.errors import ProtocolError
from invstream.frontend.sexpr import Atom, parse_one
from invstream.frontend.terms import CUR, PRIMED, App, Const, Sort, Term, Var

_SIMPLE = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")
_RESERVED = {
    "true", "false", "and", "or", "not", "ite", "let", "forall", "exists", "par",
    "as", "distinct", "assert", "check-sat", "push", "pop", "declare-fun",
    "define-fun", "to_real", "to_int", "is_int", "div", "mod", "abs", "xor",
    "_", "!", "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL",
}


def symbol(name: str, epoch=CUR) -> str:
    """Solver-side name of a variable copy: ``x``, ``x!p`` or ``x!i3``."""
    if epoch == CUR:
        raw = name
    elif epoch == PRIMED:
        raw = name + "!p"
    else:
        raw = f"{name}!i{epoch}"
    if _SIMPLE.match(raw) and raw not in _RESERVED and not raw[0].isdigit():
        return raw
    return "|" + raw + "|"


def sort_name(sort: Sort) -> str:
    return sort.value


def render_number(value, sort: Sort) -> str:
    f = Fraction(value)
    if sort is Sort.INT:
        text = str(abs(f.numerator))
    elif f.denominator == 1:
        text = f"{abs(f.numerator)}.0"
    else:
        text = f"(/ {abs(f.numerator)} {f.denominator})"
    return f"(- {text})" if f < 0 else text


_OPNAME = {"neg": "-"}


def emit_formula(t: Term) -> str:
    """SMT-LIB text for a typechecked term."""
    parts = []
    _emit(t, False, parts)
    return "".join(parts)


def _emit(t, want_real, out):
    if isinstance(t, Const):
        if t.sort is Sort.BOOL:
            out.append("true" if t.value else "false")
        elif want_real and t.sort is Sort.INT:
            out.append(render_number(t.value, Sort.REAL))
        else:
            out.append(render_number(t.value, t.sort))
        return
    if isinstance(t, Var):
        if want_real and t.sort is Sort.INT:
            out.append(f"(to_real {symbol(t.name, t.epoch)})")
        else:
            out.append(symbol(t.name, t.epoch))
        return
    if not isinstance(t, App):
        raise TypeError(f"cannot emit {t!r}")
    op = t.op
    if op in ("and", "or") and len(t.args) == 1:
        _emit(t.args[0], False, out)
        return
    if op in ("+", "-", "neg", "*"):
        if want_real and t.sort is Sort.INT:
            out.append("(to_real ")
            _emit(t, False, out)
            out.append(")")
            return
        child_real = t.sort is Sort.REAL
        out.append("(" + _OPNAME.get(op, op))
        for a in t.args:
            out.append(" ")
            _emit(a, child_real, out)
        out.append(")")
        return
    if op == "ite":
        if want_real and t.sort is Sort.INT:
            out.append("(to_real ")
            _emit(t, False, out)
            out.append(")")
            return
        branch_real = t.sort is Sort.REAL
        out.append("(ite ")
        _emit(t.args[0], False, out)
        out.append(" ")
        _emit(t.args[1], branch_real, out)
        out.append(" ")
        _emit(t.args[2], branch_real, out)
        out.append(")")
        return
    # predicates and Boolean connectives
    real_args = False
    if op in ("=", "<", "<=", ">", ">="):
        real_args = any(a.sort is Sort.REAL for a in t.args)
    out.append("(" + op)
    for a in t.args:
        out.append(" ")
        _emit(a, real_args, out)
    out.append(")")


def _number(node) -> Fraction:
    if isinstance(node, Atom):
        try:
            return Fraction(str(node))
        except ValueError:
            raise ProtocolError(f"not a numeral: {node}") from None
    if isinstance(node, list) and node and isinstance(node[0], Atom):
        head = str(node[0])
        if head == "-" and len(node) == 2:
            return -_number(node[1])
        if head == "/" and len(node) == 3:
            den = _number(node[2])
            if den == 0:
                raise ProtocolError("zero denominator in solver value")
            return _number(node[1]) / den
        if head == "to_real" and len(node) == 2:
            return _number(node[1])
    raise ProtocolError(f"unsupported value syntax: {node}")


def parse_value(node, sort: Sort):
    """Parse a solver value (atom or s-expression, or its text) of ``sort``."""
    if isinstance(node, str) and not isinstance(node, Atom):
        node = parse_one(node)
    if sort is Sort.BOOL:
        if isinstance(node, Atom) and str(node) in ("true", "false"):
            return str(node) == "true"
        raise ProtocolError(f"expected a Bool value, got {node}")
    f = _number(node)
    if sort is Sort.INT:
        if f.denominator != 1:
            raise ProtocolError(f"non-integral Int value {node}")
        return int(f)
    return f
