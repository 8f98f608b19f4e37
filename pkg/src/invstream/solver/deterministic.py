"""A session stand-in that answers queries by bounded enumeration.

Models are chosen as the lexicographically least assignment to the requested
variables, which makes analysis trajectories reproducible. Variables named in
``prefer`` are compared first (in that order), the rest in the order requested. Unsat answers inside the bounds are only claimed when a backing
solver agrees; otherwise the answer is Unknown, since the bounds may simply be
too small.
"""

from __future__ import annotations

from collections import Counter
from typing import Sequence

from invstream.errors import EnumerationError
from invstream.frontend.terms import Term, Var, free_vars
from invstream.solver.enumerate import DEFAULT_CAP, BoundsSpec, search_models
from invstream.solver.session import SatResult


class DeterministicSession:
    def __init__(self, bounds: BoundsSpec, backing=None, cap: int = DEFAULT_CAP, prefer: Sequence[str] = ()):
        self.bounds = bounds
        self.prefer = {name: i for i, name in enumerate(prefer)}
        self.backing = backing
        self.cap = cap
        self.stats = Counter()

    def check_sat_with_model(self, f: Term, wanted: Sequence[Var] = ()) -> SatResult:
        wanted = list(wanted)
        seen = {v.key for v in wanted}
        rest = sorted((v for v in free_vars(f) if v.key not in seen), key=lambda v: (str(v.epoch), v.name))
        head = sorted(wanted, key=lambda v: self.prefer.get(v.name, len(self.prefer)))
        order = head + rest
        self.stats["check"] += 1
        try:
            found = search_models(f, order, self.bounds, cap=self.cap, detect_escape=True)
        except EnumerationError as e:
            self.stats["unknown"] += 1
            return SatResult("unknown", reason=f"enumeration: {e}")
        if found.states:
            self.stats["sat"] += 1
            least = found.states[0]
            return SatResult("sat", dict(zip(head, least[: len(head)])))
        if self.backing is not None:
            res = self.backing.check_sat_with_model(f, wanted)
            self.stats["backing"] += 1
            self.stats[res.status] += 1
            return res
        self.stats["unknown"] += 1
        return SatResult("unknown", reason="no model within oracle bounds")

    @property
    def depth(self):
        return 0

    def close(self):
        if self.backing is not None:
            self.backing.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

