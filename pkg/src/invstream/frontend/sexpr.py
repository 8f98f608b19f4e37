"""Minimal s-expression reader used by the native format and the solver pipe."""

from __future__ import annotations

from invstream.errors import ParseError


class Atom(str):
    line = 0
    column = 0
    quoted = False

    @classmethod
    def at(cls, text, line, column, quoted=False):
        a = cls(text)
        a.line, a.column, a.quoted = line, column, quoted
        return a


class SList(list):
    line = 0
    column = 0


def tokenize(text: str):
    """Yield ``(kind, text, line, column)`` with kind in ``( ) atom string``."""
    i, n = 0, len(text)
    line, col = 1, 1

    def advance(k):
        nonlocal i, line, col
        for ch in text[i : i + k]:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1
        i += k

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
        elif ch == ";":
            j = text.find("\n", i)
            advance((n if j < 0 else j) - i)
        elif ch in "()":
            yield ch, ch, line, col
            advance(1)
        elif ch == '"':
            start_line, start_col = line, col
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated string", start_line, start_col)
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            yield "string", "".join(buf), start_line, start_col
            advance(j + 1 - i)
        elif ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                raise ParseError("unterminated quoted symbol", line, col)
            yield "qatom", text[i + 1 : j], line, col
            advance(j + 1 - i)
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n()";|':
                j += 1
            yield "atom", text[i:j], line, col
            advance(j - i)


def parse_all(text: str) -> list:
    """Parse every top-level s-expression in ``text``."""
    stack = [SList()]
    for kind, tok, line, col in tokenize(text):
        if kind == "(":
            lst = SList()
            lst.line, lst.column = line, col
            stack.append(lst)
        elif kind == ")":
            if len(stack) == 1:
                raise ParseError("unbalanced ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(Atom.at(tok, line, col, quoted=kind in ("qatom", "string")))
    if len(stack) != 1:
        lst = stack[-1]
        raise ParseError("unbalanced '('", lst.line, lst.column)
    return stack[0]


def parse_one(text: str):
    items = parse_all(text)
    if len(items) != 1:
        raise ParseError(f"expected one s-expression, found {len(items)}")
    return items[0]


def complete_prefix(text: str) -> int:
    """Length of the first complete s-expression in ``text`` or -1."""
    depth = 0
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == '"':
            j = i + 1
            while True:
                if j >= n:
                    return -1
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':
                        j += 2
                        continue
                    break
                j += 1
            i = j + 1
            if depth == 0:
                return i
            continue
        if ch == "|":
            j = text.find("|", i + 1)
            if j < 0:
                return -1
            i = j + 1
            if depth == 0:
                return i
            continue
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return i + 1
        elif ch in " \t\r\n":
            pass
        elif depth == 0:
            j = i
            while j < n and text[j] not in ' \t\r\n()"|':
                j += 1
            if j == n:
                return -1  # atom may continue
            return j
        i += 1
    return -1
