import os

from hypothesis import HealthCheck, settings, strategies as st

from superext.hyperspace import InclusionHyperspace

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=500)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

EXTENDED = bool(os.environ.get("SUPEREXT_EXTENDED"))


@st.composite
def hyperspaces(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    sets = draw(st.lists(st.integers(1, (1 << n) - 1), min_size=1, max_size=6))
    return InclusionHyperspace(n, sets)
