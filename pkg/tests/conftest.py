import os
import shutil
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

from invstream.solver import Session, SolverConfig  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SOLVER = os.environ.get("INVSTREAM_SOLVER") or "z3"
HAVE_SOLVER = shutil.which(SOLVER) is not None

needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason=f"solver {SOLVER!r} not found")


@pytest.fixture
def session():
    if not HAVE_SOLVER:
        pytest.skip(f"solver {SOLVER!r} not found")
    with Session(SolverConfig(path=SOLVER)) as s:
        yield s


@pytest.fixture
def sessions():
    if not HAVE_SOLVER:
        pytest.skip(f"solver {SOLVER!r} not found")
    a, b = Session(SolverConfig(path=SOLVER)), Session(SolverConfig(path=SOLVER))
    yield a, b
    a.close()
    b.close()
