import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from markedrot.errors import MarkovViolation, Unsupported
from markedrot.exactnum import ALPHA, sign
from markedrot.ostrowski import (
    AMinusOne,
    Constant,
    DigitRule,
    MarkedPoint,
    Periodic,
    expand,
    markov_validate,
    pair_stats,
    parse_rule,
    partial_value,
    position_stats,
    synthesize,
    z_alpha_membership_hint,
)
from markedrot.towers import locate_bruteforce

from conftest import ALPHAS, GOLDEN, SILVER, digit_strings, random_rule


def test_alpha_sits_in_column_a_minus_1_golden():
    assert expand(ALPHA, GOLDEN, 12) == [0] * 12
    for n in range(1, 11):
        loc = locate_bruteforce(ALPHA, GOLDEN, n)
        assert (loc.tower, loc.level, loc.column) == ("large", 0, GOLDEN[n + 1] - 1)


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_expand_half_matches_bruteforce_columns(name):
    pq = ALPHAS[name]
    digits = expand(Fraction(1, 2), pq, 13)
    for n in range(1, 12):
        loc = locate_bruteforce(Fraction(1, 2), pq, n)
        assert digits[n] == loc.column
        assert (loc.tower == "small") == (digits[n - 1] == pq[n])


@pytest.mark.parametrize("name", sorted(ALPHAS))
@given(data=st.data())
def test_round_trip(name, data):
    pq = ALPHAS[name]
    digits = data.draw(digit_strings(pq, 30))
    s = synthesize(DigitRule.explicit(digits, Constant(0)), pq, 30)
    assert expand(s.midpoint, pq, 30)[:28] == digits[:28]


def test_synthesize_rejects_markov_violation():
    pq = ALPHAS["three_one"]  # a_1 = 3
    with pytest.raises(MarkovViolation):
        synthesize([3, 3], pq, 2)


def test_markov_validate_examples():
    assert markov_validate([0] * 10, GOLDEN) is None
    assert markov_validate([0, 0, 1, 1, 0], GOLDEN) == 4
    assert markov_validate([0, 0, 2], GOLDEN) == 3
    assert markov_validate([0, 0, 2, 0, 1], SILVER) is None


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_partial_sum_tail_bound(name, rng):
    pq = ALPHAS[name]
    for _ in range(5):
        rule = random_rule(pq, 60, rng)
        for N in (5, 10, 20):
            base = partial_value(rule.digits(pq, N), pq)
            for k in (1, 2, 5):
                diff = base - partial_value(rule.digits(pq, N + k), pq)
                bound = pq.alpha_n(N - 1)
                assert sign(bound - diff, pq) > 0 and sign(bound + diff, pq) > 0


def test_constant_zero_tail():
    rule = DigitRule.constant(0)
    for N in range(4, 20):
        diff = partial_value(rule.digits(GOLDEN, N), GOLDEN) - partial_value(rule.digits(GOLDEN, N + 2), GOLDEN)
        a = GOLDEN.alpha_n(N)
        assert sign(a - diff, GOLDEN) > 0 and sign(a + diff, GOLDEN) > 0


@pytest.mark.parametrize("value", [Fraction(1, 3), Fraction(2, 7), Fraction(9, 10)])
def test_cylinder_of_expansion_contains_value(value):
    for pq in ALPHAS.values():
        digits = expand(value, pq, 25)
        s = synthesize(digits, pq, 25)
        assert s.cylinder.contains(value - ALPHA * 0, pq)
        assert sign(pq.alpha_n(24) - s.cylinder.width(), pq) >= 0


def test_nested_cylinders(rng):
    pq = GOLDEN
    rule = random_rule(pq, 40, rng)
    prev = None
    for N in range(1, 30):
        cyl = synthesize(rule, pq, N).cylinder
        if prev is not None:
            assert sign(cyl.lo - prev.lo, pq) >= 0 and sign(prev.hi - cyl.hi, pq) >= 0
        prev = cyl


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_position_stats_invariants(name, rng):
    pq = ALPHAS[name]
    for _ in range(4):
        b = MarkedPoint("b", random_rule(pq, 80, rng), pq)
        for n in range(1, 20):
            ps = position_stats(b, pq, n)
            assert ps.column == b.digit(n + 1)
            w = pq.alpha_n(n) if ps.tower == "small" else pq.alpha_n(n - 1)
            assert sign(ps.x, pq) > 0 and sign(w - ps.x, pq) > 0
            assert ps.x_prime == w - ps.x
            assert ps.y_prime > 0 and 0 <= ps.y < pq.q(n) + pq.q(n - 1)
            if ps.tower == "small":
                assert ps.y_second == ps.y - pq.q(n)
                assert ps.y_prime == pq.q(n) + pq.q(n - 1) - ps.y
            else:
                assert ps.y_second is None and ps.y_prime == pq.q(n) - ps.y


def test_position_stats_golden_constant_zero_against_bruteforce():
    b = MarkedPoint("b", DigitRule.constant(0), GOLDEN)
    ps = position_stats(b, GOLDEN, 5)
    loc = locate_bruteforce(b.representative(), GOLDEN, 5)
    assert (ps.tower, ps.y, ps.column) == (loc.tower, loc.level, loc.column)
    assert ps.x == loc.offset


def test_one_minus_alpha_has_no_stats():
    t = MarkedPoint.one_minus_alpha_point(GOLDEN)
    with pytest.raises(Unsupported):
        position_stats(t, GOLDEN, 3)


def test_pair_stats_identity_and_symmetry(rng):
    pq = SILVER
    b1 = MarkedPoint("b1", random_rule(pq, 80, rng), pq)
    b2 = MarkedPoint("b2", random_rule(pq, 80, rng), pq)
    for n in range(1, 15):
        same = pair_stats(b1, b1, pq, n)
        assert same.x_gap.is_zero() and same.y_gap == 0
        s12, s21 = pair_stats(b1, b2, pq, n), pair_stats(b2, b1, pq, n)
        assert (s12.x_gap, s12.y_gap) == (s21.x_gap, s21.y_gap)


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_digit_agreement_lemma(name):
    pq = ALPHAS[name]
    r = random.Random(7)
    for _ in range(6):
        d1 = random_rule(pq, 80, r).digits(pq, 80)
        d2 = list(d1)
        # differ only at a few early levels, agree afterwards
        for n in (2, 5):
            d2[n - 1] = 0 if d1[n - 1] else min(1, pq[n])
            if n < 80 and d2[n - 1] == pq[n]:
                d2[n] = 0
        if markov_validate(d2, pq) is not None:
            continue
        b1 = MarkedPoint("b1", DigitRule.explicit(d1, Constant(0)), pq)
        b2 = MarkedPoint("b2", DigitRule.explicit(d2, Constant(0)), pq)
        for n in range(1, 20):
            if d1[n] == d2[n]:
                now, nxt = pair_stats(b1, b2, pq, n), pair_stats(b1, b2, pq, n + 1)
                assert nxt.x_gap == now.x_gap and nxt.y_gap == now.y_gap


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_a_minus_1_digit_keeps_distance_to_alpha(name, rng):
    pq = ALPHAS[name]
    for _ in range(4):
        b = MarkedPoint("b", random_rule(pq, 80, rng), pq)
        for n in range(1, 20):
            # alpha's vertical only crosses the large tower
            if b.digit(n + 1) == pq[n + 1] - 1 and position_stats(b, pq, n).tower == "large":
                s0, s1 = pair_stats(b, b, pq, n), pair_stats(b, b, pq, n + 1)
                assert s1.x_alpha == s0.x_alpha
                assert position_stats(b, pq, n + 1).y == position_stats(b, pq, n).y


def test_membership_hints():
    pq = GOLDEN
    assert z_alpha_membership_hint([1, 0, 1] + [0] * 20, pq).likely_in_z_alpha
    assert not z_alpha_membership_hint([1, 0, 0] * 10, pq).likely_in_z_alpha
    assert z_alpha_membership_hint([0, 1] * 12, pq).pattern == "even_max"


@pytest.mark.parametrize("text", [
    "prefix=[1,0]; tail=const(0)",
    "tail=a_minus_1",
    "tail=pattern([1,0,0])",
    "prefix=[0,1]; tail=schedule(1..10: const(0), 11..: pattern([1,0,0]))",
    "tail=a_max(even)",
])
def test_rule_dsl_round_trip(text):
    rule = parse_rule(text)
    again = parse_rule(rule.to_dsl())
    assert again.digits(GOLDEN, 40) == rule.digits(GOLDEN, 40)
    assert again.to_dsl() == rule.to_dsl()


def test_rule_constructors():
    assert DigitRule.a_minus_1().digits(SILVER, 5) == [1] * 5
    assert DigitRule(tail=Periodic((1, 0, 0))).digits(GOLDEN, 6) == [1, 0, 0, 1, 0, 0]
    assert DigitRule(tail=AMinusOne()).digits(GOLDEN, 3) == [0, 0, 0]


def test_bad_rule_text():
    with pytest.raises(ValueError):
        parse_rule("tail=bogus(1)")


def test_rational_mode_points_stop_at_trust_depth():
    from markedrot.errors import DepthExceeded
    from markedrot.exactnum import PartialQuotients

    pq = PartialQuotients.from_rational(Fraction(987, 1597), 12)
    b = MarkedPoint("b", DigitRule.periodic([1, 0, 0]), pq)
    assert b.rep_depth == 12
    assert position_stats(b, pq, 5).column == b.digit(6)
    with pytest.raises(DepthExceeded):
        position_stats(b, pq, 11)
