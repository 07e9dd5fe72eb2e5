import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pdc_ldpc import DifferenceDesign, random_design

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DATA = Path(__file__).parent / "data"

SHORT_W2 = [[4], [3], [2], [1]]
ALIASED_W3 = [[5, 4], [3, 7], [1, 12]]


@pytest.fixture
def short_w2():
    return DifferenceDesign.from_lists(SHORT_W2)


@pytest.fixture
def aliased_w3():
    return DifferenceDesign.from_lists(ALIASED_W3)


def roomy_max_diff(a, w):
    # wide enough that rejection sampling succeeds within a few hundred draws
    return 2 * a * w + 1


@st.composite
def raw_designs(draw, max_a=5, max_w=4, max_diff=20):
    """Any valid design, cycles allowed."""
    a = draw(st.integers(1, max_a))
    w = draw(st.integers(2, max_w))
    col = st.tuples(*[st.integers(1, max_diff)] * (w - 1))
    return DifferenceDesign(a=a, w=w, diffs=tuple(draw(col) for _ in range(a)))


@st.composite
def cycle_free_designs(draw, max_a=5, max_w=4, min_a=1, min_w=2):
    """Random-search designs, which are 4-cycle-free by construction."""
    a = draw(st.integers(min_a, max_a))
    w = draw(st.integers(min_w, max_w))
    seed = draw(st.integers(0, 2**31))
    return random_design(a, w, roomy_max_diff(a, w), seed=seed)


def small_tail_biting_codes():
    """Tail-biting PDC codes small enough (k <= 24) for exhaustive enumeration."""
    from pdc_ldpc import tail_biting_matrix, uniform_design
    from pdc_ldpc.matrix import rank_gf2

    designs = [
        DifferenceDesign.from_lists([[2], [1]]),
        DifferenceDesign.from_lists(SHORT_W2),
        uniform_design(3, 2),
        uniform_design(2, 3),
        DifferenceDesign.from_lists([[2, 3], [1, 5]]),
        random_design(2, 3, 13, seed=4),
        random_design(2, 4, 17, seed=1),
        random_design(3, 2, 13, seed=2),
    ]
    codes = []
    for d in designs:
        for n in range(d.lh, 40):
            h = tail_biting_matrix(d, n)
            if h.cols - rank_gf2(h) <= 24:
                codes.append((d, n))
    return codes


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
