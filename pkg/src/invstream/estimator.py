"""A scikit-learn style front for the analysis.

``fit`` takes a transition system (or a path to one) and computes invariants;
``predict`` then labels states by whether they satisfy all of them, which
makes the result usable wherever an estimator is expected (for instance to
flag states of a simulation trace that no reachable state could produce).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from invstream.domains import make_domain
from invstream.engine import EngineConfig, run
from invstream.frontend import parse_expression, parse_formula, parse_lustre, parse_native, translate
from invstream.frontend.system import TransitionSystem
from invstream.frontend.terms import CUR, Sort, conj, render
from invstream.solver import DeterministicSession, Session, SolverConfig
from invstream.solver.enumerate import BoundsSpec
from invstream.solver.evaluator import compile_term, normalize


def _load(X):
    if isinstance(X, TransitionSystem):
        return X
    if isinstance(X, (str, Path)):
        p = Path(X)
        text = p.read_text()
        return translate(parse_lustre(text)) if p.suffix == ".lus" else parse_native(text)
    raise TypeError(f"expected a TransitionSystem or a path, got {type(X).__name__}")


class InvariantGenerator(BaseEstimator):
    """Invariant generation as an estimator.

    Parameters mirror the command-line flags. ``partition`` is a list of
    formulas (infix or s-expression text); ``bounds`` (a ``BoundsSpec`` or
    its text form) switches to deterministic least-model selection.

    Fitted attributes: ``ts_``, ``domain_``, ``result_``, ``invariants_``
    (rendered confirmed formulas), ``final_`` (the post-fixpoint element or
    ``None`` after an abort) and ``n_iter_``.
    """

    def __init__(self, domain="product", partition=None, widen_delay=4, thresholds=None,
                 k=2, max_iters=10000, confirm=True, solver=None, timeout=30.0, bounds=None):
        self.domain = domain
        self.partition = partition
        self.widen_delay = widen_delay
        self.thresholds = thresholds
        self.k = k
        self.max_iters = max_iters
        self.confirm = confirm
        self.solver = solver
        self.timeout = timeout
        self.bounds = bounds

    def _predicates(self, ts):
        out = []
        for text in self.partition or ():
            text = text.strip()
            out.append(parse_formula(text, ts.vars) if text.startswith("(") else parse_expression(text, ts.vars))
        return out

    def fit(self, X, y=None):
        ts = _load(X)
        dom = make_domain(self.domain, ts, self._predicates(ts))
        cfg = EngineConfig(
            widen_delay=self.widen_delay,
            thresholds=None if self.thresholds is None else frozenset(self.thresholds),
            max_iters=self.max_iters,
            k=self.k,
            confirm=self.confirm,
        )
        scfg = SolverConfig(path=self.solver or "", timeout_ms=int(self.timeout * 1000))
        with Session(scfg) as engine_s, Session(scfg) as confirm_s:
            if self.bounds is not None:
                bounds = self.bounds if isinstance(self.bounds, BoundsSpec) else BoundsSpec.parse(self.bounds, ts.vars)
                engine_s = DeterministicSession(bounds, backing=engine_s)
            result = run(ts, dom, cfg, (engine_s, confirm_s))
        self.ts_ = ts
        self.domain_ = dom
        self.result_ = result
        self.final_ = result.final
        self.n_iter_ = result.iterations
        self.invariants_ = [render(f) for f, _ in result.confirmed]
        parts = [f for f, _ in result.confirmed]
        if result.final is not None:
            parts.append(dom.gamma(result.final))
        self._checks = [compile_term(f) for f, _ in result.confirmed]
        self._all = compile_term(conj(*parts))
        return self

    def _envs(self, states):
        if not hasattr(self, "ts_"):
            raise NotFittedError("call fit before predict")
        variables = self.ts_.vars
        for row in states:
            if isinstance(row, dict):
                row = [row[v.name] for v in variables]
            row = list(row)
            if len(row) != len(variables):
                raise ValueError(f"state has {len(row)} values, the system has {len(variables)} variables")
            env = {}
            for v, x in zip(variables, row):
                if v.sort is Sort.BOOL:
                    x = bool(x)
                elif isinstance(x, (np.integer, np.floating)):
                    x = x.item()
                env[(v.name, CUR)] = normalize(x, v.sort)
            yield env

    def predict(self, X):
        """``True`` for each state (row or name-keyed dict) satisfying every invariant found."""
        return np.array([self._all(env) is True for env in self._envs(X)], dtype=bool)

    def transform(self, X):
        """Boolean matrix: one column per confirmed invariant, in ``invariants_`` order."""
        rows = [[f(env) is True for f in self._checks] for env in self._envs(X)]
        return np.array(rows, dtype=bool).reshape(len(rows), len(self._checks))
