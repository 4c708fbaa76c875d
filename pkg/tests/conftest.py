import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from trapcc.geometry import DistanceVector, trapezoid_distances
from trapcc.golden import golden

settings.register_profile("default", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SQRT3 = math.sqrt(3.0)


@pytest.fixture
def square():
    return golden("SQ")


@pytest.fixture
def iso():
    return golden("ISO")


@pytest.fixture
def tetra():
    return DistanceVector(1, 1, 1, 1, 1, 1)


@pytest.fixture(params=["E1", "E2", "E3"])
def cc_golden(request):
    return golden(request.param)


def dist_from_points(pts) -> DistanceVector:
    pts = [np.asarray(p, dtype=float) for p in pts]
    return DistanceVector(**{f"r{i}{j}": float(np.linalg.norm(pts[i - 1] - pts[j - 1]))
                             for i, j in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))})


def rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
