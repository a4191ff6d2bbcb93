import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from heistriod.curves import TriodState

settings.register_profile("default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)
points = st.tuples(finite, finite, finite).map(np.array)


@st.composite
def polylines(draw, min_nodes=2, max_nodes=30):
    n = draw(st.integers(min_nodes, max_nodes))
    flat = draw(st.lists(finite, min_size=2 * n, max_size=2 * n))
    return np.array(flat).reshape(n, 2)


@st.composite
def triods(draw, min_J=3, max_J=12):
    """Regular triods: three noisy spokes leaving a common junction."""
    seed = draw(st.integers(0, 2**32 - 1))
    J = draw(st.integers(min_J, max_J))
    rng = np.random.default_rng(seed)
    S = rng.uniform(-1, 1, 2)
    angles = rng.uniform(0, 2 * math.pi) + np.array([0.0, 2.1, 4.2]) + rng.uniform(-0.5, 0.5, 3)
    u = np.linspace(0.0, 1.0, J + 1)[:, None]
    curves = []
    for ang in angles:
        P = S + rng.uniform(0.5, 3.0) * np.array([math.cos(ang), math.sin(ang)])
        c = (1 - u) * S + u * P
        c[1:-1] += rng.normal(scale=0.25 * np.hypot(*(P - S)) / J, size=(J - 1, 2))
        curves.append(c)
    return TriodState.from_curves(np.stack(curves), endpoint_z=rng.normal(size=3))


@pytest.fixture
def steiner_state():
    s3 = math.sqrt(3.0)
    u = np.linspace(0.0, 1.0, 101)[:, None]
    ends = np.array([[-2.0, 0.0], [1.0, -s3], [1.0, s3]])
    curves = np.stack([u * e for e in ends])
    for a in range(3):
        curves[a, -1] = ends[a]
    return TriodState.from_curves(curves)


def unit_polygon(J):
    t = np.linspace(0.0, 2 * math.pi, J + 1)
    c = np.column_stack([np.cos(t), np.sin(t)])
    c[-1] = c[0]
    return c


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
