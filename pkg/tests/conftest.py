import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from knapsack_fptas.instance import Item
from knapsack_fptas.stepfn import StepFunction

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@st.composite
def step_functions(draw, max_points=8, max_gap=9):
    """Canonical step functions with integer breakpoints."""
    k = draw(st.integers(0, max_points))
    dx = draw(st.lists(st.integers(1, max_gap), min_size=k, max_size=k))
    dy = draw(st.lists(st.integers(1, max_gap), min_size=k, max_size=k))
    return StepFunction(np.cumsum(dx), np.cumsum(dy))


@st.composite
def unit_items(draw, min_size=0, max_size=8, grid=1024):
    """Items with profits in [1, 2] on a dyadic grid and small integer weights."""
    n = draw(st.integers(min_size, max_size))
    return [
        Item(draw(st.integers(1, 40)), 1 + draw(st.integers(0, grid)) / grid)
        for _ in range(n)
    ]


def items_from(pairs):
    return [Item(float(w), float(p)) for w, p in pairs]
