import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hicalib.errors import (
    AbsoluteContinuityViolation,
    DimensionMismatch,
    SumMismatch,
    ZeroDenominator,
)
from hicalib.simplex import (
    Outcome,
    canonical_key,
    dist_from_json,
    entropy,
    kl_divergence,
    l1_distance,
    l1_distance_exact,
    make_rational_dist,
    point_mass,
    uniform,
)


def dists(d=None, full_support=False):
    lo = 1 if full_support else 0
    dim = st.just(d) if d else st.integers(2, 6)
    return dim.flatmap(
        lambda n: st.lists(st.integers(lo, 30), min_size=n, max_size=n)
    ).map(
        lambda units: make_rational_dist(
            units if any(units) else [1] + [0] * (len(units) - 1), max(sum(units), 1)
        )
    )


class TestMakeRationalDist:
    def test_gcd_reduction(self):
        a = make_rational_dist([8, 4], 12)
        assert (a.numerators, a.denominator) == ((2, 1), 3)

    def test_point_mass_fixed_point(self):
        a = make_rational_dist([1, 0, 0], 1)
        assert (a.numerators, a.denominator) == ((1, 0, 0), 1)

    def test_sum_mismatch(self):
        with pytest.raises(SumMismatch):
            make_rational_dist([3, 2], 6)

    def test_zero_denominator(self):
        with pytest.raises(ZeroDenominator):
            make_rational_dist([0, 0], 0)

    def test_dimension_floor(self):
        with pytest.raises(DimensionMismatch):
            make_rational_dist([1], 1)

    def test_json_round_trip(self):
        a = make_rational_dist([2, 3, 5], 10)
        assert dist_from_json(a.to_json()) == a


class TestL1:
    def test_identity(self):
        a = make_rational_dist([3, 5], 8)
        assert l1_distance(a, a) == 0.0

    def test_disjoint_point_masses(self):
        assert l1_distance(point_mass(2, 1), point_mass(2, 2)) == 2.0

    def test_hand_value(self):
        a = make_rational_dist([1, 1], 2)
        b = make_rational_dist([3, 1], 4)
        assert l1_distance_exact(a, b) == Fraction(1, 2)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            l1_distance(uniform(2), uniform(3))


class TestEntropy:
    def test_point_mass(self):
        assert entropy(point_mass(5, 3)) == 0.0

    def test_uniform(self):
        assert entropy(uniform(4)) == pytest.approx(math.log(4), abs=1e-12)

    def test_half_support(self):
        a = make_rational_dist([1, 1, 0, 0], 2)
        assert entropy(a) == pytest.approx(math.log(2), abs=1e-12)


class TestKL:
    def test_self_is_zero(self):
        a = make_rational_dist([2, 3, 5], 10)
        assert kl_divergence(a, a) == 0.0

    def test_point_vs_uniform(self):
        assert kl_divergence(point_mass(2, 1), uniform(2)) == pytest.approx(
            math.log(2), abs=1e-12
        )

    def test_hand_value(self):
        # independent evaluation: 0.75 ln(3/2) + 0.25 ln(1/2)
        expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
        x = make_rational_dist([3, 1], 4)
        p = uniform(2)
        assert kl_divergence(x, p) == pytest.approx(0.1308120359411370, abs=1e-9)
        assert kl_divergence(x, p) == pytest.approx(expected, abs=1e-12)

    def test_absolute_continuity(self):
        with pytest.raises(AbsoluteContinuityViolation):
            kl_divergence(uniform(2), point_mass(2, 1))


class TestCanonicalKey:
    def test_scaled_forms_share_key(self):
        assert canonical_key(make_rational_dist([8, 4], 12)) == canonical_key(
            make_rational_dist([2, 1], 3)
        )

    def test_distinct_points_differ(self):
        assert canonical_key(make_rational_dist([1, 1], 2)) != canonical_key(
            make_rational_dist([1, 3], 4)
        )

    def test_outcome_one_hot(self):
        assert Outcome(2).one_hot(3) == point_mass(3, 2)


@given(dists(), dists())
def test_l1_bounds(a, b):
    if a.d != b.d:
        return
    v = l1_distance_exact(a, b)
    assert 0 <= v <= 2


@given(dists(d=4), dists(d=4), dists(d=4))
def test_l1_triangle(a, b, c):
    assert l1_distance_exact(a, c) <= l1_distance_exact(a, b) + l1_distance_exact(b, c)


@given(dists(d=3), dists(d=3, full_support=True))
def test_pinsker(x, p):
    assert l1_distance(x, p) ** 2 <= 2 * kl_divergence(x, p) + 1e-9


@given(dists())
def test_entropy_bounds(a):
    assert -1e-12 <= entropy(a) <= math.log(a.d) + 1e-12


@given(dists(), st.integers(1, 50))
def test_key_congruence(a, scale):
    scaled = make_rational_dist(
        [n * scale for n in a.numerators], a.denominator * scale
    )
    assert canonical_key(scaled) == canonical_key(a)
    assert scaled == a
