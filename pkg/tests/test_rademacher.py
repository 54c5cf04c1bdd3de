from fractions import Fraction
import math

from hypothesis import given, settings, strategies as st
import pytest

import oracles
from khinlab import rademacher
from khinlab.errors import DimensionTooLarge, DomainError, MalformedWeight
from khinlab.rademacher import (
    CoefficientVector,
    exact_distribution,
    exact_moment,
    exact_tail,
    prob_zero,
)
from khinlab.weights import WeightSpec

decimals = st.decimals(min_value=-50, max_value=50, places=3, allow_nan=False, allow_infinity=False)
vectors = st.lists(decimals.map(str), min_size=1, max_size=8)


def test_distribution_two_unit_signs():
    assert exact_distribution([1, 1]) == [(-2, Fraction(1, 4)), (0, Fraction(1, 2)), (2, Fraction(1, 4))]


def test_distribution_point_six_point_eight():
    got = exact_distribution(["0.6", "0.8"])
    want = [(Fraction(v), Fraction(1, 4)) for v in ("-1.4", "-0.2", "0.2", "1.4")]
    assert got == want


def test_distribution_counterexample_weight_kills_sum():
    w = WeightSpec.sign_function(2, [1, 0, 0, 1])
    assert exact_distribution([1, -1], w) == [(0, 1)]


@pytest.mark.parametrize("xs, p, expected", [
    ([1, 1], 1, 1.0),
    (["0.6", "0.8"], 4, 1.9216),
    ([0, 0, 0], 2.5, 0.0),
])
def test_moment_examples(xs, p, expected):
    rep = exact_moment(xs, p)
    assert rep.absolute_moment == pytest.approx(expected, rel=1e-14, abs=0)
    assert rep.method == "exact" and rep.standard_error == 0 and rep.sample_count == 0


@pytest.mark.parametrize("xs, t, expected", [
    (["0.6", "0.8"], 1, Fraction(1, 2)),
    ([1], 2, 0),
    ([1, 1], 0, Fraction(1, 2)),
])
def test_tail_examples(xs, t, expected):
    assert exact_tail(xs, t, strict=True) == expected


def test_tail_ties_are_exact():
    # |xi| takes the value 0.2 exactly; a float path would be fragile here
    assert exact_tail(["0.6", "0.8"], "0.2", strict=True) == Fraction(1, 2)
    assert exact_tail(["0.6", "0.8"], "0.2", strict=False) == 1


@pytest.mark.parametrize("xs, expected", [([1, 1], Fraction(1, 2)), ([1], 0), ([1, 2, 3], Fraction(1, 4))])
def test_prob_zero_examples(xs, expected):
    assert prob_zero(xs) == expected


@given(vectors)
@settings(max_examples=60, deadline=None)
def test_distribution_matches_brute_force(xs):
    law = oracles.rademacher_law(xs)
    assert dict(exact_distribution(xs)) == law


@given(vectors, st.sampled_from(["0.5", "1", "2", "3.5"]))
@settings(max_examples=60, deadline=None)
def test_moment_matches_brute_force(xs, p):
    want = float(oracles.moment(oracles.rademacher_law(xs), float(p)))
    assert exact_moment(xs, p).absolute_moment == pytest.approx(want, rel=1e-13, abs=1e-300)


@given(vectors, decimals.map(lambda d: str(abs(d))), st.booleans())
@settings(max_examples=60, deadline=None)
def test_tail_matches_brute_force(xs, t, strict):
    assert exact_tail(xs, t, strict=strict) == oracles.tail(oracles.rademacher_law(xs), t, strict)


def test_weighted_distribution_matches_brute_force():
    table = ["1.5", "0", "2", "0.25"]
    aux = [("1", "0.3"), ("0.5", "0.7")]
    w = WeightSpec.sign_function(2, table, aux)
    xs = ["0.3", "-1.2", "2"]
    law = oracles.rademacher_law(xs, table, 2, aux)
    assert dict(exact_distribution(xs, w)) == law
    for p in (0.5, 1, 3):
        want = float(oracles.moment(law, p))
        assert exact_moment(xs, p, w).absolute_moment == pytest.approx(want, rel=1e-13)


class TestInvariants:
    @given(vectors)
    @settings(max_examples=80, deadline=None)
    def test_parseval(self, xs):
        cv = CoefficientVector(xs)
        got = exact_moment(cv, 2).absolute_moment
        assert got == pytest.approx(cv.norm2_squared, rel=1e-12, abs=0)

    @given(vectors)
    @settings(max_examples=80, deadline=None)
    def test_fourth_moment_inequality(self, xs):
        m2 = exact_moment(xs, 2).absolute_moment
        m4 = exact_moment(xs, 4).absolute_moment
        assert m4 <= 3 * m2 * m2 + 1e-12 * m2 * m2

    @given(vectors)
    @settings(max_examples=40, deadline=None)
    def test_norm_monotone_in_p(self, xs):
        norms = [exact_moment(xs, p).norm for p in (0.25, 0.5, 1, 1.5, 2, 3, 4, 8)]
        assert all(a <= b * (1 + 1e-13) for a, b in zip(norms, norms[1:]))

    @given(vectors, st.randoms(use_true_random=False))
    @settings(max_examples=60, deadline=None)
    def test_permutation_and_sign_flips_bit_exact(self, xs, rnd):
        ys = [x if rnd.random() < 0.5 else (x[1:] if x.startswith("-") else "-" + x) for x in xs]
        rnd.shuffle(ys)
        for p in (1, 2.5):
            assert exact_moment(xs, p).absolute_moment == exact_moment(ys, p).absolute_moment
        assert exact_distribution(xs) == exact_distribution(ys)
        assert prob_zero(xs) == prob_zero(ys)
        assert exact_tail(xs, "1.5") == exact_tail(ys, "1.5")

    @given(vectors, st.sampled_from(["-3", "0.5", "7.25"]), st.sampled_from([1, 2.5, 4]))
    @settings(max_examples=60, deadline=None)
    def test_scaling(self, xs, c, p):
        from decimal import Decimal
        scaled = [str(Decimal(x) * Decimal(c)) for x in xs]
        base = exact_moment(xs, p).absolute_moment
        assert exact_moment(scaled, p).absolute_moment == pytest.approx(
            abs(float(c)) ** p * base, rel=1e-12, abs=1e-300)

    @given(vectors)
    @settings(max_examples=40, deadline=None)
    def test_probabilities_are_dyadic_and_sum_to_one(self, xs):
        dist = exact_distribution(xs)
        probs = [p for _, p in dist]
        assert sum(probs) == 1
        assert all(p > 0 and (p.denominator & (p.denominator - 1)) == 0 for p in probs)
        assert [v for v, _ in dist] == sorted(v for v, _ in dist)


def test_moment_report_norm_consistent():
    rep = exact_moment(["0.3", "1.7", "-2.2"], 3.3)
    assert rep.norm ** 3.3 == pytest.approx(rep.absolute_moment, rel=1e-12)
    assert rep.second_norm == pytest.approx(math.sqrt(0.09 + 2.89 + 4.84), rel=1e-15)


def test_blocked_enumeration_matches_single_block(monkeypatch):
    xs = ["0.5", "-1.25", "2", "3", "0.75", "-1", "1.5", "4", "0.25", "2.5"]
    w = WeightSpec.sign_function(3, ["1", "0", "2", "0.5", "3", "1", "0", "1"], [("1", "0.5"), ("2", "0.5")])
    whole = (exact_moment(xs, 3, w), exact_tail(xs, "2.5", w), exact_distribution(xs, w), prob_zero(xs))
    for bits in (2, 5):
        monkeypatch.setattr(rademacher, "CHUNK_BITS", bits)
        got = (exact_moment(xs, 3, w), exact_tail(xs, "2.5", w), exact_distribution(xs, w), prob_zero(xs))
        assert got == whole


def test_wide_integers_fall_back_to_python_ints():
    xs = ["123456789012345", "-123456789012344", "1e-15", "1"]
    cv = CoefficientVector(xs)
    assert cv.exact
    assert prob_zero(["123456789012345", "-123456789012345", "1e-14"]) == 0
    dist = dict(exact_distribution(xs))
    assert dist == oracles.rademacher_law(xs)
    assert exact_tail(xs, "1.000000000000001") == oracles.tail(oracles.rademacher_law(xs), "1.000000000000001")


def test_tolerance_mode_for_long_decimals():
    x = 0.1 + 0.2  # 0.30000000000000004, 17 significant digits
    cv = CoefficientVector([x, 0.3])
    assert not cv.exact
    assert prob_zero(cv) == Fraction(1, 2)
    assert exact_tail(cv, 0.6, strict=True) == 0
    assert exact_tail(cv, 0.6, strict=False) == Fraction(1, 2)
    assert not exact_moment(cv, 2).exact_arithmetic
    assert len(exact_distribution(cv)) == 3


def test_decimal_inputs_are_echoed():
    cv = CoefficientVector(["1.50", "-2e-3", 0.25])
    assert cv.texts == ["1.50", "-0.002", "0.25"]


class TestErrors:
    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLarge):
            exact_moment([1] * 5, 2, n_max=4)

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("KHINLAB_NMAX", "3")
        with pytest.raises(DimensionTooLarge):
            prob_zero([1, 1, 1, 1])
        assert prob_zero([1, 1]) == Fraction(1, 2)

    @pytest.mark.parametrize("p", [0, -1, "nan", "abc"])
    def test_nonpositive_p(self, p):
        with pytest.raises(DomainError):
            exact_moment([1], p)

    def test_weight_deeper_than_sum(self):
        with pytest.raises(MalformedWeight):
            exact_moment([1], 1, WeightSpec.sign_function(2, [1, 1, 1, 1]))

    def test_empty_vector(self):
        with pytest.raises(DomainError):
            CoefficientVector([])

    def test_negative_tail_level(self):
        with pytest.raises(DomainError):
            exact_tail([1], -1)
