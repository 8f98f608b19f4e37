"""Incremental SMT-LIB 2 sessions over a child process."""

from __future__ import annotations

import logging
import os
import select
import shutil
import subprocess
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from invstream.errors import ProtocolError, SolverError, SolverSpawnError
from invstream.frontend.sexpr import Atom, complete_prefix, parse_one
from invstream.frontend.terms import Term, Var, free_vars
from invstream.solver.smtlib import emit_formula, parse_value, sort_name, symbol

log = logging.getLogger(__name__)

ENV_VAR = "INVSTREAM_SOLVER"


@dataclass
class SolverConfig:
    path: str = ""
    args: list = field(default_factory=list)
    logic: str = "QF_LIRA"
    timeout_ms: int = 30000

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if not self.path:
            self.path = os.environ.get(ENV_VAR) or "z3"

    def command(self) -> list:
        exe = shutil.which(self.path) or self.path
        base = os.path.basename(self.path).lower()
        if self.args:
            extra = list(self.args)
        elif base.startswith("z3"):
            extra = ["-in", "-smt2"]
        elif base.startswith("cvc"):
            extra = ["--lang=smt2", "--incremental"]
        elif base.startswith("yices"):
            extra = ["--incremental"]
        else:
            extra = []
        return [exe] + extra


@dataclass(frozen=True)
class SatResult:
    """``status`` is ``sat``, ``unsat`` or ``unknown``.

    ``model`` maps the requested :class:`Var` terms to values when sat.
    """

    status: str
    model: dict | None = None
    reason: str | None = None

    @property
    def is_sat(self):
        return self.status == "sat"

    @property
    def is_unsat(self):
        return self.status == "unsat"

    @property
    def is_unknown(self):
        return self.status == "unknown"

    def state(self, variables) -> tuple:
        """Values of ``variables`` (Var terms) as a tuple."""
        return tuple(self.model[v] for v in variables)


SAT_EMPTY = SatResult("sat", {})
UNSAT = SatResult("unsat")


class Session:
    """One solver process with an assertion stack.

    A session is single-owner; calls must not interleave across threads.
    """

    def __init__(self, config: SolverConfig | None = None):
        self.config = config or SolverConfig()
        self.stats = Counter()
        self._buffer = ""
        self._declared = [set()]
        self._dead = False
        cmd = self.config.command()
        try:
            self.proc = subprocess.Popen(
                cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as e:
            raise SolverSpawnError(f"cannot start solver {self.config.path!r}: {e}") from None
        try:
            self._command("(set-option :print-success true)")
            self._command("(set-option :produce-models true)")
            self._command(f"(set-option :timeout {self.config.timeout_ms})", lenient=True)
            self._command(f"(set-logic {self.config.logic})")
        except SolverError as e:
            self.close()
            raise SolverSpawnError(f"handshake with {self.config.path!r} failed: {e}") from None

    # -- raw protocol ----------------------------------------------------

    def _write(self, text):
        if self._dead:
            raise SolverError("solver session is closed")
        log.debug("> %s", text)
        try:
            self.proc.stdin.write((text + "\n").encode())
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            self._dead = True
            raise SolverError(f"solver pipe closed: {e}") from None

    def _read(self, deadline):
        fd = self.proc.stdout.fileno()
        while True:
            end = complete_prefix(self._buffer)
            if end >= 0:
                text, self._buffer = self._buffer[:end], self._buffer[end:]
                log.debug("< %s", text.strip())
                return parse_one(text)
            remaining = None if deadline is None else deadline - time.monotonic()
            if remaining is not None and remaining <= 0:
                return None
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                return None
            chunk = os.read(fd, 65536)
            if not chunk:
                self._dead = True
                raise ProtocolError("solver exited unexpectedly")
            self._buffer += chunk.decode()

    def _command(self, text, lenient=False, deadline=None):
        self._write(text)
        reply = self._read(deadline if deadline is not None else time.monotonic() + 60)
        if reply is None:
            raise ProtocolError(f"no reply to {text}")
        if isinstance(reply, Atom) and str(reply) == "success":
            return
        if lenient and isinstance(reply, Atom) and str(reply) == "unsupported":
            return
        if lenient and isinstance(reply, list) and reply and reply[0] == "error":
            return
        raise ProtocolError(f"unexpected reply to {text}: {reply}")

    # -- stack and declarations -----------------------------------------------

    @property
    def depth(self) -> int:
        return len(self._declared) - 1

    def push(self):
        self._command("(push 1)")
        self._declared.append(set())

    def pop(self):
        if self.depth == 0:
            raise SolverError("pop on empty assertion stack")
        self._command("(pop 1)")
        self._declared.pop()

    def is_declared(self, v: Var) -> bool:
        return any(v.key in level for level in self._declared)

    def declare(self, variables):
        for v in sorted(set(variables), key=lambda u: (u.name, str(u.epoch))):
            if self.is_declared(v):
                continue
            self._command(f"(declare-fun {symbol(v.name, v.epoch)} () {sort_name(v.sort)})")
            self._declared[-1].add(v.key)

    def add(self, t: Term):
        """Assert ``t`` at the current level, declaring its variables."""
        self.declare(free_vars(t))
        self._command(f"(assert {emit_formula(t)})")

    # -- queries ------------------------------------------------------------------

    def check(self) -> SatResult:
        budget = self.config.timeout_ms / 1000
        deadline = time.monotonic() + 2 * budget + 5
        self._write("(check-sat)")
        self.stats["check"] += 1
        reply = self._read(deadline)
        if reply is None:
            self.stats["unknown"] += 1
            self.close(force=True)
            return SatResult("unknown", reason="timeout")
        status = str(reply) if isinstance(reply, Atom) else None
        if status == "sat":
            self.stats["sat"] += 1
            return SAT_EMPTY
        if status == "unsat":
            self.stats["unsat"] += 1
            return UNSAT
        if status == "unknown":
            self.stats["unknown"] += 1
            return SatResult("unknown", reason=self._reason_unknown())
        raise ProtocolError(f"unexpected check-sat reply: {reply}")

    def _reason_unknown(self):
        self._write("(get-info :reason-unknown)")
        reply = self._read(time.monotonic() + 10)
        if isinstance(reply, list) and len(reply) == 2:
            reason = str(reply[1])
            if reason in ("timeout", "canceled") or "resource" in reason:
                return "timeout"
            return reason
        return "unknown"

    def get_values(self, variables: Sequence[Var]) -> dict:
        variables = list(variables)
        if not variables:
            return {}
        names = " ".join(symbol(v.name, v.epoch) for v in variables)
        self._write(f"(get-value ({names}))")
        reply = self._read(time.monotonic() + 60)
        if not isinstance(reply, list) or len(reply) != len(variables):
            raise ProtocolError(f"malformed get-value reply: {reply}")
        out = {}
        for v, pair in zip(variables, reply):
            if not isinstance(pair, list) or len(pair) != 2:
                raise ProtocolError(f"malformed get-value entry: {pair}")
            out[v] = parse_value(pair[1], v.sort)
        return out

    def check_sat_with_model(self, f: Term, wanted: Sequence[Var] = ()) -> SatResult:
        """Check ``f`` in a fresh scope and return values for ``wanted``."""
        self.push()
        try:
            self.declare(wanted)
            self.add(f)
            res = self.check()
            if res.is_sat:
                return SatResult("sat", self.get_values(wanted))
            return res
        finally:
            if not self._dead:
                self.pop()

    # -- lifecycle ------------------------------------------------------------------

    def close(self, force=False):
        if getattr(self, "proc", None) is None:
            return
        if not self._dead and not force:
            try:
                self.proc.stdin.write(b"(exit)\n")
                self.proc.stdin.flush()
            except OSError:
                pass
        self._dead = True
        try:
            self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=2)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()
        self.proc.stdout.close()

    @property
    def alive(self) -> bool:
        return not self._dead and self.proc.poll() is None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def __del__(self):
        try:
            self.close(force=True)
        except Exception:
            pass


def open_session(config: SolverConfig | None = None) -> Session:
    return Session(config)


def check_sat_with_model(session, f: Term, wanted: Sequence[Var] = ()) -> SatResult:
    return session.check_sat_with_model(f, wanted)
