import random

import pytest
from hypothesis import settings, strategies as st

from markedrot.exactnum import PartialQuotients
from markedrot.ostrowski import Constant, DigitRule

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

GOLDEN = PartialQuotients.golden()
SILVER = PartialQuotients.periodic([2])
ONE_TWO = PartialQuotients.periodic([1, 2])
THREE_ONE = PartialQuotients.periodic([1], [3])
ALPHAS = {"golden": GOLDEN, "silver": SILVER, "one_two": ONE_TWO, "three_one": THREE_ONE}


def markov_fix(raw, pq):
    """Map arbitrary non-negative integers to a Markov-valid digit string."""
    out = []
    for n, x in enumerate(raw, start=1):
        if out and out[-1] == pq[n - 1]:
            out.append(0)
        else:
            out.append(x % (pq[n] + 1))
    return out


def random_digits(pq, N, rng):
    return markov_fix([rng.randrange(10) for _ in range(N)], pq)


def random_rule(pq, N, rng):
    return DigitRule.explicit(random_digits(pq, N, rng), Constant(0))


def digit_strings(pq, N):
    return st.lists(st.integers(0, 9), min_size=N, max_size=N).map(lambda raw: markov_fix(raw, pq))


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(params=sorted(ALPHAS), ids=str)
def pq(request):
    return ALPHAS[request.param]


ACCEPTANCE_LINES = {}


def record_criterion(k, title, ok, detail=""):
    ACCEPTANCE_LINES[k] = f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
