"""Shared strategies and assertion helpers."""

import os

import hypothesis.strategies as st
from hypothesis import settings

from slgraph import Opinion

settings.register_profile("stress", max_examples=2000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def opinions(draw, min_uncertainty=0.0, base_rate=None):
    """Valid opinion drawn from the belief simplex.

    Drawing b first and d from what remains keeps additivity exact by
    construction.  ``min_uncertainty`` floors u (evidence-notation operators
    blow up as u approaches 0).
    """
    b = draw(st.floats(min_value=0.0, max_value=1.0 - min_uncertainty,
                       allow_nan=False, allow_infinity=False))
    d = draw(st.floats(min_value=0.0, max_value=max(1.0 - min_uncertainty - b, 0.0),
                       allow_nan=False, allow_infinity=False))
    a = draw(_unit) if base_rate is None else base_rate
    return Opinion(b, d, 1.0 - b - d, a)


def non_dogmatic(base_rate=None):
    # Evidence magnitude grows as W/u; 1e-5 keeps double-precision error on
    # evidence counts well below the 1e-9 unfusion threshold.
    return opinions(min_uncertainty=1e-5, base_rate=base_rate)


def assert_opinion_close(actual, expected, tol=1e-9):
    __tracebackhide__ = True
    pairs = zip(("belief", "disbelief", "uncertainty", "base_rate"),
                actual.as_tuple(), expected.as_tuple())
    for name, got, want in pairs:
        assert abs(got - want) <= tol, (
            f"{name}: got {got!r}, expected {want!r} (tol {tol}); "
            f"actual={actual} expected={expected}"
        )
