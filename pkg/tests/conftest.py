import pytest
from hypothesis import HealthCheck, settings

from hicalib.rng import Stream, stream_key
from hicalib.simplex import RationalDist, make_rational_dist

settings.register_profile(
    "suite", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("suite")


def fixed_stream(tag: int) -> Stream:
    """Deterministic stream for test-local randomness."""
    return Stream(stream_key(0xC0FFEE, 4, tag))


def random_dist(stream: Stream, d: int, max_unit: int = 9, full_support: bool = False) -> RationalDist:
    lo = 1 if full_support else 0
    units = [lo + stream.below(max_unit) for _ in range(d)]
    if not any(units):
        units[stream.below(d)] = 1
    return make_rational_dist(units, sum(units))


@pytest.fixture
def stream():
    return fixed_stream(1)
