import math
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from surftopo import EdgeLetter, GluingWord, SurfaceChart, field_from_expression

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TORUS_H = "(cos(u)+2)*cos(v)"
PERTURBED_H = "(cos(u)+2)*cos(v)+0.3*sin(u)*sin(v)"


@pytest.fixture(scope="session")
def torus_chart():
    return SurfaceChart.square(0.0, 2 * math.pi, periodic=True)


@pytest.fixture(scope="session")
def torus_h(torus_chart):
    return field_from_expression(TORUS_H, torus_chart)


@st.composite
def gluing_words(draw, max_labels=4):
    """Random closed-surface words over labels x0, x1, ..."""
    k = draw(st.integers(1, max_labels))
    slots = draw(st.permutations([f"x{i}" for i in range(k)] * 2))
    signs = draw(st.lists(st.sampled_from([1, -1]), min_size=2 * k, max_size=2 * k))
    return GluingWord(tuple(EdgeLetter(lab, s) for lab, s in zip(slots, signs)))


def as_pairs(w):
    return [(x.label, x.exponent) for x in w]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.result_line(n))
