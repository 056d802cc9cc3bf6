from fractions import Fraction

import numpy as np
import pytest

from markedrot.language import bslr_check, complexity, cylinders, factors, ne_series, specials
from markedrot.ostrowski import DigitRule
from markedrot.system import marked_coding, random_base_point, veech_spec

from conftest import ALPHAS, GOLDEN, SILVER, random_rule

LR_RULE = DigitRule.periodic([1, 0, 0])


@pytest.fixture
def lr_spec():
    return veech_spec(GOLDEN, LR_RULE)


def test_level_one_marked_partition(lr_spec):
    dec = cylinders(lr_spec, "marked", 1)
    assert len(dec) == lr_spec.r + 1
    lo, hi = dec.total_length()
    assert lo <= 1 <= hi
    beta = lr_spec.points[0].representative().approx(GOLDEN)
    n1 = ne_series(lr_spec, "marked", 1)[0]
    assert float(n1[1]) <= min(beta, 1 - beta) + 1e-15 and float(n1[2]) >= min(beta, 1 - beta) - 1e-15


@pytest.mark.parametrize("name", sorted(ALPHAS))
def test_rotation_cylinders_sturmian(name, lr_spec):
    pq = ALPHAS[name]
    spec = veech_spec(pq, DigitRule.constant(0))
    for n in range(1, 51, 7):
        dec = cylinders(spec, "rotation", n)
        assert len(dec) == n + 1
        assert dec.words() == factors(spec, "rotation", n)
        lo, hi = dec.total_length()
        assert lo <= 1 <= hi


def test_marked_complexity_is_2n(lr_spec):
    assert complexity(lr_spec, "marked", 0) == 1
    prev = 1
    for n in range(1, 40):
        p = complexity(lr_spec, "marked", n)
        arcs = len(cylinders(lr_spec, "marked", n))
        # 2n arcs; a word may label two arcs while n is small
        assert arcs == 2 * n and p <= arcs
        if n >= 4:
            assert p == 2 * n
        assert p >= prev
        prev = p


def test_cylinder_words_match_factors(rng):
    spec = veech_spec(SILVER, random_rule(SILVER, 80, rng))
    for n in (3, 10, 25):
        dec = cylinders(spec, "marked", n)
        assert len(dec.words()) <= len(dec)
        assert dec.words() == factors(spec, "marked", n)


def test_orbit_factors_lie_in_tower_factors(rng):
    spec = veech_spec(GOLDEN, random_rule(GOLDEN, 80, rng))
    r = np.random.default_rng(2)
    word = marked_coding(spec, random_base_point(r), 3000)
    for n in (5, 13, 34):
        fs = factors(spec, "marked", n)
        assert {word[i:i + n] for i in range(len(word) - n)} <= fs


def test_e_n_decreasing(lr_spec):
    rows = ne_series(lr_spec, "marked", 60)
    for (n0, lo0, hi0), (n1, lo1, hi1) in zip(rows, rows[1:]):
        assert lo1 / n1 <= hi0 / n0


def test_specials_counting_identity(lr_spec):
    for n in range(0, 20):
        sp = specials(lr_spec, "marked", n)
        assert len(sp.right_special) == complexity(lr_spec, "marked", n + 1) - complexity(lr_spec, "marked", n)
    assert () in specials(lr_spec, "marked", 0).bispecial


def test_bslr_conforms_for_lr_spec(lr_spec):
    checked = 0
    # the initial length C_0 is about 30 for this point; shorter W may have 3 continuations
    for n in range(30, 90):
        for W in specials(lr_spec, "marked", n).bispecial:
            assert bslr_check(lr_spec, "marked", W, n // 4).conforms
            checked += 1
    assert checked > 0


def test_bslr_requires_bispecial(lr_spec):
    words = factors(lr_spec, "marked", 6)
    sp = specials(lr_spec, "marked", 6)
    w = next(iter(words - sp.bispecial))
    with pytest.raises(ValueError):
        bslr_check(lr_spec, "marked", w, 4)


def test_ne_series_enclosures_ordered(lr_spec):
    for n, lo, hi in ne_series(lr_spec, "marked", 30):
        assert 0 < lo <= hi
