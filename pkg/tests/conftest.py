from __future__ import annotations

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lcext.poly import MultiPoly

settings.register_profile(
    "fixed",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fixed")

VARS = ("d", "l", "m")

rationals = st.builds(
    Fraction,
    st.integers(min_value=-9, max_value=9),
    st.integers(min_value=1, max_value=5),
)


@st.composite
def polys(draw, vars=VARS, max_terms=5, max_exp=3):
    terms = {}
    for _ in range(draw(st.integers(min_value=0, max_value=max_terms))):
        exp = tuple(draw(st.integers(min_value=0, max_value=max_exp)) for _ in vars)
        terms[exp] = draw(rationals)
    return MultiPoly(vars, terms)
