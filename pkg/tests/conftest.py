import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from pentagram.kernel import Point  # noqa: E402

SAMPLE_PENTAGON = [Point(Fraction(x), Fraction(y)) for x, y in [(0, 0), (4, 0), (5, 3), (2, 5), (-1, 3)]]


def rationals(bound=20, denom=12):
    return st.builds(
        lambda n, d: Fraction(n, d),
        st.integers(-bound * denom, bound * denom),
        st.integers(1, denom),
    )


def points(bound=20, denom=12):
    return st.builds(Point, rationals(bound, denom), rationals(bound, denom))


@pytest.fixture
def pentagon():
    return list(SAMPLE_PENTAGON)
