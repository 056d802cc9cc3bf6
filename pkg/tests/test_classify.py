import pytest
from hypothesis import given, strategies as st

from markedrot import classify
from markedrot.classify import (
    LRStatus,
    Verdict,
    VerdictValue,
    always_isolated_scan,
    cluster_on_alpha_detect,
    isolated,
    linear_recurrence_check,
    run_report,
    unique_ergodicity_sufficient,
    verdict,
)
from markedrot.errors import NotMinimal
from markedrot.exactnum import PartialQuotients
from markedrot.ostrowski import Constant, DigitRule
from markedrot.rigidity import construct_nrnlr_pair, nrnlr_spec
from markedrot.system import EXCHANGE, IDENTITY2, SystemSpec, make_points, make_spec, veech_spec

from conftest import GOLDEN, SILVER, digit_strings, markov_fix

LR_RULE = DigitRule.periodic([1, 0, 0])


def growing_zero_runs(depth=300):
    """Golden digits with isolated 1s and zero runs of length 1, 2, 3, ..."""
    digits, k = [], 1
    while len(digits) < depth:
        digits += [1] + [0] * k
        k += 1
    return DigitRule.explicit(digits[:depth], Constant(0))


def clustering_windows(depth=300):
    """Zero windows (start, length) of growing length separated by 1,0,0 blocks."""
    out, n, k = [], 1, 6
    while n < depth:
        n += 9
        out.append((n, k))
        n += k
        k += 4
    return out


def clustering_rule(depth=300):
    digits = []
    for _, k in clustering_windows(depth):
        digits += [1, 0, 0] * 3 + [0] * k
    return DigitRule.explicit(digits[:depth], Constant(0))


def test_unbounded_quotients_violate_first_bullet():
    pq = PartialQuotients.periodic([1], list(range(1, 31)))
    spec = veech_spec(pq, DigitRule.constant(0))
    lr = linear_recurrence_check(spec, 40)
    assert lr.status is LRStatus.INCONSISTENT
    assert "bounded partial quotients" in lr.violated
    v = verdict(spec, 40)
    assert (v.value, v.tag) == (VerdictValue.RIGID, "unbounded-pq-rigid")


def test_periodic_100_is_consistent():
    lr = linear_recurrence_check(veech_spec(GOLDEN, LR_RULE), 200)
    assert lr.consistent
    m = lr.report.maxima()
    assert max(m["a_minus_1"], m["a_parity"]) <= 2


def test_growing_runs_violate_second_bullet():
    lr = linear_recurrence_check(veech_spec(GOLDEN, growing_zero_runs()), 200)
    assert lr.status is LRStatus.INCONSISTENT
    assert "runs of b_n = a_n - 1" in lr.violated


def test_zero_digits_isolated_when_quotients_large():
    spec = veech_spec(SILVER, DigitRule.constant(0))
    assert all(isolated(spec, "b1", n, 1) for n in range(2, 60))


def test_a_minus_1_window_not_isolated():
    spec = veech_spec(SILVER, DigitRule.explicit([0] * 10 + [1] * 10, Constant(0)))
    assert not isolated(spec, "b1", 18, 6)
    assert isolated(spec, "b1", 12, 6)


def test_equal_digits_on_window_break_isolation():
    pq = SILVER
    d1 = [0, 2, 0] + [0] * 20
    d2 = [1, 0, 0] + [0] * 20
    pts = sorted(make_points(pq, [("b1", DigitRule.explicit(d1, Constant(0))), ("b2", DigitRule.explicit(d2, Constant(0)))]),
                 key=lambda p: p.fixed())
    spec = SystemSpec(pq, tuple(pts), (EXCHANGE, IDENTITY2, EXCHANGE))
    assert not isolated(spec, "b1", 12, 4) and not isolated(spec, "b2", 12, 4)
    assert isolated(spec, "b1", 4, 4)


def test_scans_on_lr_and_nrnlr():
    assert always_isolated_scan(veech_spec(GOLDEN, LR_RULE), 6, 200).holds
    r1, r2 = construct_nrnlr_pair(GOLDEN, 6)
    spec = nrnlr_spec(GOLDEN, r1, r2)
    scan = always_isolated_scan(spec, 6, 200)
    assert scan.holds
    b2 = [p.id for p in spec.points if p.rule.to_dsl() == r2.to_dsl()][0]
    assert b2 in scan.witnesses


def test_clustering_spec_fails_inside_windows():
    spec = veech_spec(GOLDEN, clustering_rule())
    windows = cluster_on_alpha_detect(spec, 200, 4)
    assert windows
    scan = always_isolated_scan(spec, 6, 200, include_alpha=True)
    assert not scan.holds
    assert any(w.m <= scan.first_failure <= w.end for w in windows)


def test_cluster_windows_found_where_built():
    spec = veech_spec(GOLDEN, clustering_rule())
    windows = cluster_on_alpha_detect(spec, 200, 4)
    built = [(m, k) for m, k in clustering_windows() if m + k - 1 <= 200]
    assert len(windows) == len(built)
    for w, (m, k) in zip(windows, built):
        # the detected window is the zero run plus the two zeros before it
        assert (w.m, w.end) == (m - 2, m + k - 1)


def test_lr_spec_has_no_long_windows():
    spec = veech_spec(GOLDEN, LR_RULE)
    K = max(run_report(spec, 200).maxima().values())
    assert cluster_on_alpha_detect(spec, 200, K + 1) == []


def test_empty_marked_set_clusters_vacuously():
    spec = make_spec(GOLDEN, [("t", None)], [EXCHANGE, IDENTITY2])
    assert cluster_on_alpha_detect(spec, 50, 4)[0].length == 49


def test_unique_ergodicity_witnesses():
    lr = unique_ergodicity_sufficient(veech_spec(GOLDEN, LR_RULE), 6, 200)
    assert lr.holds and len(lr.witnesses) > 10
    assert not unique_ergodicity_sufficient(veech_spec(GOLDEN, DigitRule.constant(0)), 6, 200).holds
    r1, r2 = construct_nrnlr_pair(GOLDEN, 6)
    ue = unique_ergodicity_sufficient(nrnlr_spec(GOLDEN, r1, r2), 6, 200)
    assert ue.holds and len(ue.witnesses) >= 3


def test_verdicts_for_veech():
    v = verdict(veech_spec(GOLDEN, LR_RULE))
    assert (v.value, v.tag) == (VerdictValue.NON_RIGID, "ostlr+nrig")
    v = verdict(veech_spec(GOLDEN, growing_zero_runs()))
    assert (v.value, v.tag) == (VerdictValue.RIGID, "tcom")
    assert v.caveat == "finite-depth" and v.witness["windows"]


def test_verdict_requires_minimality():
    pq = GOLDEN
    from markedrot.system import Permutation

    pts = sorted(make_points(pq, [("b1", DigitRule.constant(0)), ("b2", LR_RULE)]), key=lambda p: p.fixed())
    spec = SystemSpec(pq, tuple(pts), (Permutation((2, 1, 3)), Permutation((1, 2, 3)), Permutation((2, 1, 3))))
    with pytest.raises(NotMinimal):
        verdict(spec)


def test_verdict_record_invariants():
    with pytest.raises(ValueError):
        Verdict(VerdictValue.RIGID, "none", {"depth": 1})
    with pytest.raises(ValueError):
        Verdict(VerdictValue.RIGID, "tcom", {})
    with pytest.raises(ValueError):
        Verdict(VerdictValue.UNKNOWN, "not-a-tag")
    Verdict(VerdictValue.UNKNOWN, "none")


@given(digit_strings(GOLDEN, 160), st.integers(20, 150))
def test_run_maxima_monotone_in_depth(digits, N):
    spec = veech_spec(GOLDEN, DigitRule.explicit(digits, Constant(0)))
    small, large = run_report(spec, N).maxima(), run_report(spec, 160).maxima()
    assert all(small[k] <= large[k] for k in small)
    assert all(v <= N for v in small.values())


@given(st.data())
def test_d2_single_point_never_unknown(data):
    pq = data.draw(st.sampled_from([GOLDEN, SILVER]))
    digits = data.draw(digit_strings(pq, 120))
    spec = veech_spec(pq, DigitRule.explicit(digits, Constant(0)))
    v = verdict(spec, 120)
    assert v.value is not VerdictValue.UNKNOWN


@given(st.integers(1, 40), st.integers(6, 30))
def test_windows_exclude_isolation(start, length):
    # all points cluster on [start, start + length]; no isolation inside once M fits
    digits = markov_fix([1, 0] * 30 + [0] * 200, GOLDEN)
    digits = digits[:start - 1] + [0] * length + [1, 0] * 60
    digits = markov_fix(digits, GOLDEN)[:200]
    spec = veech_spec(GOLDEN, DigitRule.explicit(digits, Constant(0)))
    M = 4
    windows = cluster_on_alpha_detect(spec, len(digits), M)
    for w in windows:
        for n in range(w.m + M, w.end + 1):
            assert not isolated(spec, "b1", n, M)
            assert not isolated(spec, "alpha", n, M)
