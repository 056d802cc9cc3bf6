import itertools
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from markedrot.exactnum import ALPHA, ZAlphaElement, frac
from markedrot.ostrowski import DigitRule, MarkedPoint
from markedrot.system import (
    EXCHANGE,
    IDENTITY2,
    LiftedPoint,
    Permutation,
    SystemSpec,
    cocycle,
    iterate,
    make_points,
    make_spec,
    marked_coding,
    minimality_check,
    natural_coding,
    product_inequality,
    project_phi,
    random_base_point,
    rotation_coding,
    sigma_of,
    step,
    veech_spec,
)

from conftest import GOLDEN, SILVER, random_rule

perms3 = st.permutations([1, 2, 3]).map(Permutation)
perms4 = st.permutations([1, 2, 3, 4]).map(Permutation)


@given(perms4, perms4, perms4)
def test_permutation_group_laws(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * a.inverse() == Permutation.identity(4)
    assert (a * b).sign() == a.sign() * b.sign()
    p = Permutation.identity(4)
    for _ in range(a.order()):
        p = p * a
    assert p.is_identity()


@given(perms3)
def test_composition_applies_right_factor_first(a):
    b = Permutation((2, 1, 3))
    for s in (1, 2, 3):
        assert (a * b)(s) == a(b(s))


def test_permutation_rejects_non_bijection():
    with pytest.raises(ValueError):
        Permutation((1, 1))


def test_constants():
    assert EXCHANGE == Permutation((2, 1)) and IDENTITY2.is_identity()
    assert EXCHANGE.order() == 2 and Permutation.cycle(3, 1, 2, 3).order() == 3


def _two_points(pq):
    return make_points(pq, [("b1", DigitRule.constant(0)), ("b2", DigitRule.periodic([1, 0, 0]))])


def test_spec_invariants():
    pq = GOLDEN
    b = make_points(pq, [("b1", DigitRule.constant(0))])
    with pytest.raises(ValueError):
        SystemSpec(pq, tuple(b), (EXCHANGE, EXCHANGE))
    with pytest.raises(ValueError):
        SystemSpec(pq, tuple(b), (EXCHANGE,))
    t1 = MarkedPoint.one_minus_alpha_point(pq, "t1")
    t2 = MarkedPoint.one_minus_alpha_point(pq, "t2")
    with pytest.raises(ValueError):
        SystemSpec(pq, (t1, t2), (EXCHANGE, IDENTITY2, EXCHANGE))
    p1, p2 = _two_points(pq)
    lo, hi = sorted([p1, p2], key=lambda p: p.fixed())
    SystemSpec(pq, (lo, hi), (EXCHANGE, IDENTITY2, EXCHANGE))
    with pytest.raises(ValueError):
        SystemSpec(pq, (hi, lo), (EXCHANGE, IDENTITY2, EXCHANGE))


def test_sigma_of_examples(rng):
    spec = veech_spec(GOLDEN, DigitRule.constant(0))
    beta = spec.points[0]
    b = beta.representative().approx(GOLDEN)
    assert sigma_of(spec, Fraction(b / 2)) == 0
    assert spec.perms[sigma_of(spec, Fraction(b / 2))] == EXCHANGE
    assert sigma_of(spec, Fraction((1 + b) / 2)) == 1
    assert sigma_of(spec, beta) == 1


def test_iterate_zero_and_steps(rng):
    spec = veech_spec(GOLDEN, random_rule(GOLDEN, 80, rng))
    p = LiftedPoint(Fraction(1, 10), 1)
    assert iterate(spec, p, 0) == p
    k = GOLDEN.q(3)
    q = p
    for _ in range(k):
        q = step(spec, q)
    assert iterate(spec, p, k) == q
    assert q.sheet == cocycle(spec, p.base, k)(1)


def test_cocycle_counts_visits_in_veech(rng):
    spec = veech_spec(SILVER, random_rule(SILVER, 80, rng))
    r = np.random.default_rng(0)
    for _ in range(20):
        x = random_base_point(r)
        n = int(r.integers(1, 200))
        visits = 0
        pos = ZAlphaElement(x, 0)
        for _ in range(n):
            visits += sigma_of(spec, frac(pos, SILVER)) == 0
            pos = pos + ALPHA
        psi = cocycle(spec, x, n)
        assert psi == (EXCHANGE if visits % 2 else IDENTITY2)


def test_cocycle_identity_small(rng):
    pq = GOLDEN
    pts = sorted(make_points(pq, [("b1", random_rule(pq, 80, rng)), ("b2", random_rule(pq, 80, rng))]),
                 key=lambda p: p.fixed())
    spec = SystemSpec(pq, tuple(pts), (Permutation((2, 1, 3)), Permutation((2, 3, 1)), Permutation((1, 2, 3))))
    r = np.random.default_rng(5)
    assert cocycle(spec, Fraction(1, 3), 0).is_identity()
    for _ in range(30):
        x = random_base_point(r)
        m, n = (int(v) for v in r.integers(0, 500, size=2))
        y = frac(ZAlphaElement(x, 0) + ALPHA * n, pq)
        assert cocycle(spec, x, m + n) == cocycle(spec, y, m) * cocycle(spec, x, n)


def test_codings_and_projection(rng):
    spec = veech_spec(GOLDEN, random_rule(GOLDEN, 80, rng))
    x = Fraction(2, 7)
    N = 300
    lifts = [natural_coding(spec, LiftedPoint(x, s), N) for s in (1, 2)]
    for w in lifts:
        assert project_phi(w) == marked_coding(spec, x, N)
    v, w = lifts
    assert all(a[0] != b[0] for a, b in zip(v, w))
    assert project_phi(()) == ()


def test_rotation_coding_near_zero():
    assert rotation_coding(GOLDEN, Fraction(1, 10**6), 1) == (0,)
    assert rotation_coding(GOLDEN, Fraction(999, 1000), 1) == (1,)


def test_minimality_examples():
    assert not minimality_check([IDENTITY2, IDENTITY2], 2)
    assert minimality_check([EXCHANGE, IDENTITY2], 2)
    assert minimality_check([Permutation((2, 1, 3)), Permutation((2, 3, 1))], 3)
    assert not minimality_check([Permutation((2, 1, 3)), Permutation((1, 2, 3))], 3)


def test_product_inequality_examples():
    pq = GOLDEN
    assert product_inequality(veech_spec(pq, DigitRule.constant(0)))
    p1, p2 = sorted(_two_points(pq), key=lambda p: p.fixed())
    assert not product_inequality(SystemSpec(pq, (p1, p2), (EXCHANGE, IDENTITY2, EXCHANGE)))
    # r = 4 with t: compare sigma_r sigma_{t-1} with sigma_0 sigma_t by hand
    items = [("b1", DigitRule.constant(0)), ("t", None), ("b3", DigitRule.periodic([1, 0, 0]))]
    pts = make_points(pq, items)
    pts = sorted(pts, key=lambda p: p.fixed() if not p.is_one_minus_alpha else int((1 - pq.as_float()) * 2**64))
    s = [Permutation((2, 1, 3)), Permutation((1, 3, 2)), Permutation((2, 3, 1)), Permutation((3, 1, 2))]
    spec = SystemSpec(pq, tuple(pts), tuple(s))
    t = spec.t
    assert product_inequality(spec) == (s[-1] * s[t - 1] != s[0] * s[t])


def test_minimal_orbits_visit_every_sheet(rng):
    pq = GOLDEN
    pts = sorted(make_points(pq, [("b1", random_rule(pq, 80, rng)), ("b2", random_rule(pq, 80, rng))]),
                 key=lambda p: p.fixed())
    for imgs in itertools.permutations([1, 2, 3]):
        perms = (Permutation((2, 1, 3)), Permutation(imgs), Permutation((1, 3, 2)))
        if perms[1] in (perms[0], perms[2]):
            continue
        spec = SystemSpec(pq, tuple(pts), perms)
        seen = {s for s, _ in natural_coding(spec, LiftedPoint(Fraction(1, 5), 1), 5000)}
        assert minimality_check(perms, 3) == (seen == {1, 2, 3})
