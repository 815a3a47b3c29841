"""Hypothesis strategies shared by the test modules."""

import numpy as np
from hypothesis import strategies as st

from cadlag_lab.paths import Mode, make_path

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@st.composite
def breakpoints(draw, max_points=12, horizon=4.0, denom=64):
    """Sorted breakpoints on a 1/denom lattice in [0, horizon)."""
    m = draw(st.integers(0, max_points))
    ticks = draw(st.lists(st.integers(1, int(horizon * denom) - 1), min_size=m, max_size=m, unique=True))
    return np.concatenate(([0.0], np.sort(ticks) / denom))


@st.composite
def step_paths(draw, dim=1, max_points=12, horizon=4.0):
    t = draw(breakpoints(max_points, horizon))
    v = draw(st.lists(st.lists(finite, min_size=dim, max_size=dim), min_size=t.size, max_size=t.size))
    return make_path(t, np.array(v), Mode.STEP, horizon)


@st.composite
def linear_paths(draw, max_points=12, horizon=4.0):
    t = draw(breakpoints(max_points, horizon))
    if t[-1] < horizon:
        t = np.append(t, horizon)
    v = draw(st.lists(finite, min_size=t.size, max_size=t.size))
    return make_path(t, v, Mode.LINEAR, horizon)


@st.composite
def staircases(draw, max_points=12, horizon=4.0, start_positive=True):
    """Nondecreasing STEP paths with A(0) > 0 (so the inverse starts at 0)."""
    t = draw(breakpoints(max_points, horizon))
    steps = draw(st.lists(st.integers(1, 8), min_size=t.size, max_size=t.size))
    v = np.cumsum(steps) / 4.0
    if not start_positive:
        v = v - v[0]
    return make_path(t, v, Mode.STEP, horizon)


@st.composite
def increasing_linear(draw, max_points=10, horizon=4.0):
    t = draw(breakpoints(max_points, horizon))
    if t[-1] < horizon:
        t = np.append(t, horizon)
    rises = draw(st.lists(st.floats(0.05, 5.0), min_size=t.size - 1, max_size=t.size - 1))
    v = np.concatenate(([0.0], np.cumsum(rises)))
    return make_path(t, v, Mode.LINEAR, horizon)
