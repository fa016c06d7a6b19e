import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from evsiting import GeoPoint, GridSpec, ProblemInstance, Site, SiteKind, generate_grid_instance

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE_LINES: list[str] = []


def _site(prefix, i, kind):
    return Site(f"{prefix}{i}", GeoPoint(38.8 + 0.01 * i, -89.95 - 0.01 * i), kind)


def make_toy(cs=1):
    """P=1, X=1, E=2 hand-checkable instance."""
    return ProblemInstance(
        pois=[_site("p", 0, SiteKind.POI)],
        existing=[_site("x", 0, SiteKind.EXISTING)],
        candidates=[_site("c", i, SiteKind.CANDIDATE) for i in range(2)],
        cs_count=cs,
        d=[[2.0, 4.0]],
        e=[[1.0, 3.0]],
        q=[[0.0, 6.0], [6.0, 0.0]],
    )


@pytest.fixture
def toy():
    return make_toy()


def random_instance(rng, e_max, cs_max=4, e_min=2, x_max=4, p_max=6):
    E = int(rng.integers(e_min, e_max + 1))
    cs = int(rng.integers(1, min(cs_max, E) + 1))
    spec = GridSpec(
        width_km=float(rng.uniform(1, 30)),
        height_km=float(rng.uniform(1, 30)),
        n_pois=int(rng.integers(1, p_max + 1)),
        n_existing=int(rng.integers(0, x_max + 1)),
        n_candidates=E,
        cs_count=cs,
        seed=int(rng.integers(2**31)),
    )
    return generate_grid_instance(spec)


def all_assignments(n):
    return ((np.arange(2**n)[:, None] >> np.arange(n)) & 1).astype(np.int8)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
