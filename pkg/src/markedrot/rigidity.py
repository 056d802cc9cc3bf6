"""Rigidity probes, exact psi_{q_n} decompositions and the constructions.

The probe statistic compares the natural coding of the d lifts of a base
point with its own shift by q, letter by letter.  The cocycle psi_{q_n}
is piecewise constant on arcs cut by the preimages of the partition
boundaries; :func:`psi_constancy` sweeps those arcs in circle order and
keeps the product of the q_n factors in a segment tree, so each crossing
costs O(log q_n).
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .errors import BudgetExceeded, DepthExceeded, LengthMismatch, ScheduleInfeasible, Undecided, Unsupported
from .exactnum import ALPHA, FIXED_MASK, FIXED_ONE, PartialQuotients, ZAlphaElement
from .orbit import TOL0, TOL_STEP, alpha_fixed, orbit_labels, point_fixed, random_dyadics
from .ostrowski import DigitRule, Periodic, Constant, markov_validate, position_stats
from .system import (
    EXCHANGE,
    IDENTITY2,
    Permutation,
    SystemSpec,
    cocycle,
    make_points,
    labels,
    perm_indices,
    sort_points,
)
from .towers import build_towers, locate

# ---------------------------------------------------------------------------
# Hamming distance and probes


def dbar(w: Sequence, w2: Sequence) -> Fraction:
    """Fraction of positions where two equal-length words differ."""
    if len(w) != len(w2):
        raise LengthMismatch(f"words of lengths {len(w)} and {len(w2)}")
    if not w:
        raise LengthMismatch("words must be non-empty")
    return Fraction(sum(a != b for a, b in zip(w, w2)), len(w))


@dataclass(frozen=True)
class ProbeResult:
    q: int
    samples: int
    N: int
    mean: float
    max: float
    resamples: int


def _strata_points(rng: np.random.Generator, samples: int) -> Iterable[tuple[int, int]]:
    """Bounds of ``samples`` equal strata of the circle, in fixed point."""
    for j in range(samples):
        yield (j * FIXED_ONE) // samples, ((j + 1) * FIXED_ONE) // samples


def probe_series(spec: SystemSpec, qs: Sequence[int], N: int, samples: int, seed: int) -> list[ProbeResult]:
    """:func:`rigidity_probe` for several q, sharing one orbit per sample point."""
    if any(q < 0 for q in qs):
        raise ValueError("q must be non-negative")
    if N < 1 or samples < 1:
        raise ValueError("need N >= 1 and samples >= 1")
    rng = np.random.default_rng(seed)
    g = spec.group()
    L = N + max(qs, default=0)
    sums = np.zeros((len(qs), samples))
    resamples = 0
    for j, (lo, hi) in enumerate(_strata_points(rng, samples)):
        while True:
            x = random_dyadics(rng, 1, lo, hi)[0]
            try:
                labs = labels(spec, x, L)
            except Undecided:
                resamples += 1
                continue
            break
        pidx = perm_indices(spec, labs)
        for i, q in enumerate(qs):
            counts = kernels.shift_mismatch(labs, pidx, g.images, q, N)
            sums[i, j] = counts.sum() / N
    return [
        ProbeResult(q, samples, N, float(sums[i].mean()), float(sums[i].max()), resamples)
        for i, q in enumerate(qs)
    ]


def rigidity_probe(spec: SystemSpec, q: int, N: int, samples: int, seed: int) -> ProbeResult:
    """Mean and max over sample points of sum_i dbar(lift i block, its q-shift).

    Base points are drawn one per equal stratum of the circle, each lift
    is coded by (sheet, interval) letters, and the sum runs over the d
    lifts, so values lie in [0, d].
    """
    return probe_series(spec, [q], N, samples, seed)[0]


# ---------------------------------------------------------------------------
# psi_{q_n} piece decomposition


class _ProductTree:
    """Segment tree over group indices; the root is f_{n-1} ... f_1 f_0."""

    def __init__(self, leaves: Sequence[int], mul: list[list[int]], identity: int) -> None:
        size = 1
        while size < max(len(leaves), 1):
            size *= 2
        self.size = size
        self.mul = mul
        t = [identity] * (2 * size)
        t[size:size + len(leaves)] = list(leaves)
        for i in range(size - 1, 0, -1):
            t[i] = mul[t[2 * i + 1]][t[2 * i]]
        self.t = t

    def set(self, k: int, v: int) -> None:
        t, mul = self.t, self.mul
        i = self.size + k
        t[i] = v
        i //= 2
        while i:
            t[i] = mul[t[2 * i + 1]][t[2 * i]]
            i //= 2

    @property
    def root(self) -> int:
        return self.t[1]


@dataclass(frozen=True)
class PsiConstancy:
    n: int
    q: int
    theta: Permutation
    thetas: tuple[Permutation, ...]
    taus: tuple[Permutation, ...]
    deviation: tuple[Fraction, Fraction]
    exact: bool
    pieces: int
    epsilon: float | None
    total: Fraction


def _taus(spec: SystemSpec, n: int) -> list[int]:
    """Labels of sigma at the leftmost (odd n) or rightmost (even n) point of each large level."""
    st = build_towers(spec.pq, n)
    b = st.large_base
    if n % 2 == 1:
        return orbit_labels(b.lo, spec.pq, spec.points, st.q_large, cut_fp=spec.cut_fixed()).tolist()
    return orbit_labels(b.hi, spec.pq, spec.points, st.q_large, left_limit=True, cut_fp=spec.cut_fixed()).tolist()


def _thetas(spec: SystemSpec, taus: Sequence[int]) -> list[int]:
    g = spec.group()
    mul = g.mul
    sig = [g.index[p.images] for p in spec.perms]
    cur = g.identity
    for lab in taus:
        cur = mul[sig[lab]][cur]
    out = [cur]
    for lab in taus[:-1]:
        s = sig[lab]
        cur = mul[mul[s][cur]][g.inverse(s)]
        out.append(cur)
    return out


def lemma_epsilon(spec: SystemSpec, n: int) -> float | None:
    """Smallest eps for which the closeness hypotheses hold at level n."""
    pq = spec.pq
    an = pq.alpha_n(n).approx(pq)
    qn = pq.q(n)
    worst = 0.0
    try:
        for _, b in spec.digit_points():
            ps = position_stats(b, pq, n)
            x, xp = ps.x.approx(pq), ps.x_prime.approx(pq)
            x_alpha = abs(xp - an)
            opts = (
                max(x_alpha / an, ps.y / qn),
                max(x / an, ps.y_prime / qn),
                max(xp / an, ps.y / qn),
            )
            worst = max(worst, min(opts))
    except DepthExceeded:
        return None
    return worst


def _level_starts(spec: SystemSpec, n: int) -> tuple[np.ndarray, list[tuple[str, int]]]:
    st = build_towers(spec.pq, n)
    a = alpha_fixed(spec.pq)
    fps, tags = [], []
    for tower in ("large", "small"):
        h = st.height(tower)
        if h == 0:
            continue
        lo = point_fixed(st.base(tower).lo, spec.pq)
        ks = np.arange(h, dtype=np.uint64)
        with np.errstate(over="ignore"):
            fps.append(np.uint64(lo) + ks * np.uint64(a))
        tags.extend((tower, k) for k in range(h))
    return np.concatenate(fps), tags


def psi_constancy(spec: SystemSpec, n: int, budget: int = 10**6, mc_samples: int = 20000,
                  seed: int = 0, mode: str = "auto") -> PsiConstancy:
    """Compare psi_{q_n} with theta_{h,n} on level h of either n-tower.

    ``mode`` is "exact", "mc" or "auto" (exact within ``budget`` pieces).
    The deviation is an enclosure of the measure where the two differ; in
    Monte Carlo mode it carries a Hoeffding bar at confidence 1 - 1e-3.
    """
    pq = spec.pq
    q = pq.q(n)
    qm = pq.q(n - 1)
    g = spec.group()
    taus = _taus(spec, n)
    theta_idx = _thetas(spec, taus)
    estimate = (spec.r + 1) * q + q + qm
    if mode == "exact" and estimate > budget:
        raise BudgetExceeded(f"{estimate} pieces exceed the budget {budget}")
    use_exact = mode == "exact" or (mode == "auto" and estimate <= budget)
    if use_exact:
        dev, modal, pieces, total = _exact_deviation(spec, n, theta_idx)
    else:
        dev, modal, pieces, total = _mc_deviation(spec, n, theta_idx, mc_samples, seed)
    sig = spec.perms
    return PsiConstancy(
        n=n,
        q=q,
        theta=g.elements[modal],
        thetas=tuple(g.elements[i] for i in theta_idx),
        taus=tuple(sig[t] for t in taus),
        deviation=dev,
        exact=use_exact,
        pieces=pieces,
        epsilon=lemma_epsilon(spec, n),
        total=total,
    )


def _exact_deviation(spec: SystemSpec, n: int, theta_idx: Sequence[int]):
    pq = spec.pq
    q = pq.q(n)
    g = spec.group()
    a = np.uint64(alpha_fixed(pq))
    cut_fp = spec.cut_fixed()  # [0, beta_1, ..., beta_r]
    ks = np.arange(q, dtype=np.uint64)
    with np.errstate(over="ignore"):
        crossing = [cut_fp[j] - ks * a for j in range(len(cut_fp))]
    lv_fp, lv_tags = _level_starts(spec, n)
    nc = len(cut_fp)
    pos = np.concatenate(crossing + [lv_fp])
    # event code: j * q + k for crossings, -1 - i for level starts
    codes = np.concatenate(
        [np.arange(q, dtype=np.int64) + j * q for j in range(nc)] + [-1 - np.arange(len(lv_tags), dtype=np.int64)]
    )
    order = np.argsort(pos, kind="stable")
    pos = pos[order]
    codes = codes[order]
    tol = int(2 * (TOL0 + TOL_STEP * (q + len(lv_tags))))
    # cluster events closer than the rounding budget
    P = pos.tolist()
    C = codes.tolist()
    m = len(P)
    clusters: list[tuple[int, int]] = []  # (first index, last index)
    i = 0
    while i < m:
        j = i
        while j + 1 < m and P[j + 1] - P[j] <= tol:
            j += 1
        clusters.append((i, j))
        i = j + 1
    # wrap-around merge
    if len(clusters) > 1 and (P[0] + FIXED_ONE) - P[-1] <= tol:
        (f0, l0), (fl, ll) = clusters[0], clusters[-1]
        clusters = clusters[1:-1] + [(fl, l0 + m)]
    sig = [g.index[p.images] for p in spec.perms]

    def event(idx: int) -> int:
        return C[idx % m]

    def position(idx: int) -> int:
        return P[idx % m] + (FIXED_ONE if idx >= m else 0)

    # labels and level on the first piece
    first_end = clusters[0][1]
    nxt_start = clusters[1][0] if len(clusters) > 1 else clusters[0][0] + m
    mid = (position(first_end) + position(nxt_start)) // 2
    mid &= FIXED_MASK
    labs = orbit_labels(Fraction(mid, FIXED_ONE), pq, spec.points, q, cut_fp=cut_fp).tolist()
    tree = _ProductTree([sig[l] for l in labs], g.mul, g.identity)
    # level containing the first piece: the last level start at or before it
    level = None
    for idx in range(first_end, first_end - m, -1):
        c = event(idx)
        if c < 0:
            level = lv_tags[-1 - c]
            break
    assert level is not None
    dev_lo = dev_hi = 0
    spans = 0
    pieces = 0
    weights: Counter = Counter()
    K = len(clusters)
    for ci in range(K):
        f, l = clusters[ci]
        if ci > 0:
            for idx in range(f, l + 1):
                c = event(idx)
                if c >= 0:
                    j, k = divmod(c, q)
                    tree.set(k, sig[j])
                else:
                    level = lv_tags[-1 - c]
        nf = clusters[ci + 1][0] if ci + 1 < K else clusters[0][0] + m
        width = position(nf) - position(l)
        spans += position(l) - position(f)
        pieces += 1
        psi = tree.root
        h = level[1]
        weights[psi] += width
        if psi != theta_idx[h]:
            dev_lo += max(width - 2 * tol, 0)
            dev_hi += width + 2 * tol
    dev_hi += spans
    total = Fraction(sum(weights.values()) + spans, FIXED_ONE)
    modal = max(weights, key=weights.get)
    return (Fraction(dev_lo, FIXED_ONE), min(Fraction(dev_hi, FIXED_ONE), Fraction(1))), modal, pieces, total


def _mc_deviation(spec: SystemSpec, n: int, theta_idx: Sequence[int], samples: int, seed: int):
    pq = spec.pq
    q = pq.q(n)
    g = spec.group()
    rng = np.random.default_rng(seed)
    bad = 0
    weights: Counter = Counter()
    for x in random_dyadics(rng, samples):
        psi = g.index[cocycle(spec, x, q).images]
        loc = locate(x, pq, n)
        h = loc.level if loc.tower == "large" else loc.level - q
        weights[psi] += 1
        bad += psi != theta_idx[h]
    p = Fraction(bad, samples)
    half = Fraction(math.sqrt(math.log(2 / 1e-3) / (2 * samples))).limit_denominator(10**12)
    modal = max(weights, key=weights.get)
    return (max(p - half, Fraction(0)), min(p + half, Fraction(1))), modal, samples, Fraction(1)


@dataclass(frozen=True)
class SequenceCandidate:
    n: int
    theta: Permutation
    zeta: int
    q: int


def rigidity_sequence_search(spec: SystemSpec, n_range: Iterable[int], **kw) -> list[SequenceCandidate]:
    """(n, theta_n, order of theta_n, zeta_n q_n) along the given levels."""
    out = []
    bound = math.factorial(spec.d)
    for n in n_range:
        pc = psi_constancy(spec, n, **kw)
        z = pc.theta.order()
        assert 1 <= z <= bound
        out.append(SequenceCandidate(n, pc.theta, z, z * pc.q))
    return out


# ---------------------------------------------------------------------------
# the psi triple for one marked point


@dataclass(frozen=True)
class PsiTriple:
    n: int
    psi1: Permutation
    psi2: Permutation
    psi3: Permutation
    tower: str


def _single_point(spec: SystemSpec):
    pts = spec.digit_points()
    if spec.r != 1 or len(pts) != 1:
        raise Unsupported("the psi triple needs exactly one marked point other than 1 - alpha")
    return pts[0][1]


def psi_triple_direct(spec: SystemSpec, n: int) -> PsiTriple:
    """The triple read off the cocycle at points of the tower bases."""
    if n < 1:
        raise ValueError("levels start at n = 1")
    beta = _single_point(spec)
    pq = spec.pq
    ps = position_stats(beta, pq, n)
    st = build_towers(pq, n)
    wl, ws = st.w_large, st.w_small
    x = ps.x
    if ps.tower == "large":
        p1 = st.point_at("large", 0, x / 2)
        p2 = st.point_at("large", 0, (x + wl) / 2)
        p3 = st.point_at("small", 0, ws / 2)
        return PsiTriple(n, cocycle(spec, p1, st.q_large), cocycle(spec, p2, st.q_large),
                         cocycle(spec, p3, st.q_small), "large")
    p1 = st.point_at("large", 0, wl / 2)
    p2 = st.point_at("small", 0, x / 2)
    p3 = st.point_at("small", 0, (x + ws) / 2)
    return PsiTriple(n, cocycle(spec, p1, st.q_large), cocycle(spec, p2, st.q_small),
                     cocycle(spec, p3, st.q_small), "small")


def _pow(p: Permutation, k: int) -> Permutation:
    out = Permutation.identity(p.d)
    for _ in range(k):
        out = p * out
    return out


def psi_step(t: PsiTriple, b_next: int, a_next: int) -> PsiTriple:
    """The triple at level n + 1 from the one at level n and the digit b_{n+1}."""
    p1, p2, p3 = t.psi1, t.psi2, t.psi3
    if t.tower == "small":
        return PsiTriple(t.n + 1, p3 * _pow(p1, a_next), p2 * _pow(p1, a_next), p1, "large")
    if b_next != a_next:
        n1 = p3 * _pow(p1, b_next) * _pow(p2, a_next - b_next)
        n2 = p3 * _pow(p1, b_next + 1) * _pow(p2, a_next - b_next - 1)
        return PsiTriple(t.n + 1, n1, n2, p2, "large")
    return PsiTriple(t.n + 1, p3 * _pow(p1, a_next), p2, p1, "small")


def psi_triple(spec: SystemSpec, n: int) -> PsiTriple:
    """The triple at level n by the tower recursion from the level-1 values."""
    beta = _single_point(spec)
    pq = spec.pq
    t = psi_triple_direct(spec, 1)
    digits = beta.digits(n)
    for m in range(1, n):
        t = psi_step(t, digits[m], pq[m + 1])
    return t


def psi_triples(spec: SystemSpec, N: int) -> list[PsiTriple]:
    """Triples at levels 1..N."""
    beta = _single_point(spec)
    out = [psi_triple_direct(spec, 1)]
    digits = beta.digits(N)
    for m in range(1, N):
        out.append(psi_step(out[-1], digits[m], spec.pq[m + 1]))
    return out


# ---------------------------------------------------------------------------
# the rigid point at d = 3

RIGID3_PERMS = (Permutation((2, 1, 3)), Permutation((2, 3, 1)))


def _sign_step(s: tuple[int, int, int, str], b: int, a: int) -> tuple[int, int, int, str]:
    s1, s2, s3, tower = s
    if tower == "small":
        return (s3 * s1 ** a, s2 * s1 ** a, s1, "large")
    if b != a:
        return (s3 * s1 ** b * s2 ** (a - b), s3 * s1 ** (b + 1) * s2 ** (a - b - 1), s2, "large")
    return (s3 * s1 ** a, s2, s1, "small")


_STABLE = (1, -1, -1, "large")


def _steer(state, prev_s1: int, n: int, pq: PartialQuotients, max_len: int = 8) -> list[int]:
    """Shortest digits b_{n+1}.. reaching the stable signs, the first one not a - 1."""
    start = (state, prev_s1, ())
    queue = deque([start])
    while queue:
        st, prev, digs = queue.popleft()
        m = n + len(digs)
        if digs and st == _STABLE and prev == 1:
            return list(digs)
        if len(digs) >= max_len:
            continue
        a = pq[m + 1]
        choices = [0] if st[3] == "small" else list(range(a + 1))
        for b in choices:
            if not digs and b == a - 1:
                continue
            queue.append((_sign_step(st, b, a), st[0], digs + (b,)))
    raise ScheduleInfeasible(f"no steering string of length <= {max_len} from level {n}")


def _signs(t: PsiTriple) -> tuple[int, int, int, str]:
    return (t.psi1.sign(), t.psi2.sign(), t.psi3.sign(), t.tower)


def construct_rigid_beta_d3(pq: PartialQuotients, depth: int = 200, first: int = 3,
                            perms: Sequence[Permutation] = RIGID3_PERMS) -> DigitRule:
    """Digits of a point whose d = 3 system is rigid.

    After ``first`` zero digits, the sign pattern of the triple is steered
    to (+, -, -) in the large tower and then held there by runs of
    b_n = a_n - 1 of lengths 2, 3, 4, ...; each run is closed by a digit
    other than a_n - 1.
    """
    return rigid3_construction(pq, depth, first, perms)[0]


def rigid3_construction(pq: PartialQuotients, depth: int = 200, first: int = 3,
                        perms: Sequence[Permutation] = RIGID3_PERMS) -> tuple[DigitRule, list[tuple[int, int]]]:
    """The rule and its scheduled runs (first, last level)."""
    if pq.max_quotient(depth + 1) > 64:
        raise ScheduleInfeasible("partial quotients too large for the working depth")
    digits = [0] * first
    probe = _rigid3_spec(pq, DigitRule.explicit(digits), perms)
    t = psi_triples(probe, first)[-1]
    state = _signs(t)
    prev = psi_triples(probe, first)[-2].psi1.sign() if first > 1 else 1
    runs: list[tuple[int, int]] = []
    k = 0
    while len(digits) < depth:
        n = len(digits)
        steer = _steer(state, prev, n, pq)
        for b in steer:
            m = len(digits)
            prev = state[0]
            state = _sign_step(state, b, pq[m + 1])
            digits.append(b)
        L = k + 2
        lo = len(digits) + 1
        for _ in range(L):
            m = len(digits)
            prev = state[0]
            state = _sign_step(state, pq[m + 1] - 1, pq[m + 1])
            digits.append(pq[m + 1] - 1)
        runs.append((lo, len(digits)))
        k += 1
    rule = DigitRule.explicit(digits, Constant(0))
    bad = markov_validate(digits, pq)
    if bad is not None:
        raise ScheduleInfeasible(f"construction broke the Markov condition at {bad}")
    return rule, runs


def _rigid3_spec(pq: PartialQuotients, rule: DigitRule, perms: Sequence[Permutation],
                 scheduled: Sequence[tuple[int, int]] = ()) -> SystemSpec:
    pts = make_points(pq, [("b1", rule)])
    opts = {"scheduled": format_schedule(scheduled)} if scheduled else {}
    return SystemSpec(pq, tuple(pts), tuple(perms), "rigid3", opts)


def rigid3_spec(pq: PartialQuotients, depth: int = 200, perms: Sequence[Permutation] = RIGID3_PERMS) -> SystemSpec:
    rule, runs = rigid3_construction(pq, depth, perms=perms)
    return _rigid3_spec(pq, rule, perms, runs)


def format_schedule(runs: Sequence[tuple[int, int]]) -> str:
    return ",".join(f"{lo}..{hi}" for lo, hi in runs)


def parse_schedule(text: str) -> list[tuple[int, int]]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        lo, hi = part.split("..")
        out.append((int(lo), int(hi)))
    return out


def rigid3_signature_check(spec: SystemSpec, N: int = 40) -> tuple[bool, list[int]]:
    """sgn psi_{1,n} = sgn psi_{1,n-1} = +1 at every scheduled level n <= N.

    Scheduled levels come from the spec option ``scheduled``; at least two
    runs of increasing length must start below N.
    """
    if spec.d != 3 or spec.r != 1 or spec.t is not None:
        return False, []
    kinds = sorted(p.order() for p in spec.perms)
    if kinds != [2, 3]:
        return False, []
    runs = parse_schedule(spec.options.get("scheduled", ""))
    runs = [(lo, hi) for lo, hi in runs if lo <= N]
    if len(runs) < 2 or any((h1 - l1) >= (h2 - l2) for (l1, h1), (l2, h2) in zip(runs, runs[1:])):
        return False, []
    trip = psi_triples(spec, N)
    levels = [n for lo, hi in runs for n in range(max(lo, 2), min(hi, N) + 1)]
    ok = all(trip[n - 1].psi1.sign() == 1 and trip[n - 2].psi1.sign() == 1 for n in levels)
    return ok, levels


# ---------------------------------------------------------------------------
# phase patterns shared by the d = 2 constructions


def _phase_digit(n: int, phase: int, a: int, prev: tuple[int, int] | None) -> int:
    """1 at n = phase mod 3, else 0, with 0 after a digit equal to its quotient."""
    if prev is not None and prev[0] == prev[1]:
        return 0
    return 1 if n % 3 == phase and a >= 1 else 0


def _phase_pattern(phase: int) -> Periodic:
    return Periodic([1 if n % 3 == phase else 0 for n in (1, 2, 3)])


def _repair(digits: list[int], pq: PartialQuotients, keep: Callable[[int], bool]) -> None:
    """Zero digits breaking the Markov condition, sparing protected positions."""
    for n in range(2, len(digits) + 1):
        if digits[n - 2] == pq[n - 1] and digits[n - 1] != 0:
            if keep(n) and not keep(n - 1):
                digits[n - 2] = 0
            else:
                digits[n - 1] = 0


def construct_nrnlr_pair(pq: PartialQuotients, M: int = 6, schedule: Callable[[int], int] | None = None,
                         depth: int = 300) -> tuple[DigitRule, DigitRule]:
    """Digits of two points giving a non-rigid, non linearly recurrent system.

    beta_2 follows a phase pattern and stays isolated; beta_1 alternates
    checkpoint segments of length 2(M + 1), phase-shifted against beta_2,
    with runs of b_n = a_n - 1 of lengths ``schedule(k)`` (default k + 1).
    """
    from .classify import isolated, always_isolated_scan

    sched = schedule or (lambda k: k + 1)
    S = 2 * (M + 1)
    for p2, p1 in ((0, 1), (0, 2), (1, 2), (1, 0), (2, 0), (2, 1)):
        b1: list[int] = []
        kinds: list[str] = []
        k = 1
        while len(b1) < depth:
            for _ in range(S):
                n = len(b1) + 1
                prev = (b1[-1], pq[n - 1]) if b1 else None
                b1.append(_phase_digit(n, p1, pq[n], prev))
                kinds.append("check")
            for _ in range(sched(k)):
                n = len(b1) + 1
                b1.append(pq[n] - 1)
                kinds.append("run")
            k += 1
        b1 = b1[:depth]
        b2 = []
        for n in range(1, depth + 1):
            prev = (b2[-1], pq[n - 1]) if b2 else None
            b2.append(_phase_digit(n, p2, pq[n], prev))
        if markov_validate(b1, pq) is not None or markov_validate(b2, pq) is not None:
            continue
        r1 = DigitRule.explicit(b1, Constant(0))
        r2 = DigitRule.explicit(b2, _phase_pattern(p2) if _tail_ok(pq, depth) else Constant(0))
        spec = nrnlr_spec(pq, r1, r2)
        N = min(depth, 200)
        if always_isolated_scan(spec, M, N).holds:
            return r1, r2
    raise ScheduleInfeasible("no phase assignment isolates beta_2 for these partial quotients")


def _tail_ok(pq: PartialQuotients, depth: int) -> bool:
    return all(pq[n] >= 1 for n in range(depth + 1, depth + 4))


def nrnlr_spec(pq: PartialQuotients, r1: DigitRule, r2: DigitRule) -> SystemSpec:
    pts = sort_points(make_points(pq, [("b1", r1), ("b2", r2)]))
    return SystemSpec(pq, tuple(pts), (EXCHANGE, IDENTITY2, EXCHANGE), "nrnlr")


def construct_d2r4(pq: PartialQuotients, M0: int = 6, m0: int = 10,
                   lengths: Callable[[int], int] | None = None, gap: int | None = None,
                   depth: int = 300) -> tuple[DigitRule, DigitRule, DigitRule, DigitRule]:
    """Digits of four points meeting the five hypotheses of the d = 2 example.

    On the windows [m_k, m_k + N_k] beta_1 has b_n = a_n - 1 and the other
    three share the phase pattern 1, 0, 0; off the windows beta_2, beta_3
    and beta_4 use three different phases and beta_1 shares beta_3's.
    Windows start at m_k != 0 mod 3 so no Markov repair touches them.
    """
    Nk = lengths or (lambda k: M0 + 4 * k)
    G = gap if gap is not None else 3 * M0
    windows = []
    m = m0
    k = 0
    while m <= depth:
        while m % 3 == 0:
            m += 1
        windows.append((m, m + Nk(k)))
        m = m + Nk(k) + G
        k += 1
    inside = [False] * (depth + 2)
    for lo, hi in windows:
        for n in range(lo, min(hi, depth) + 1):
            inside[n] = True
    off_phase = {"b1": 1, "b2": 0, "b3": 1, "b4": 2}
    out = {}
    for id, ph in off_phase.items():
        digs: list[int] = []
        for n in range(1, depth + 1):
            prev = (digs[-1], pq[n - 1]) if digs else None
            if inside[n]:
                if id == "b1":
                    digs.append(pq[n] - 1)
                else:
                    digs.append(1 if n % 3 == 0 else 0)
            else:
                digs.append(_phase_digit(n, ph, pq[n], prev))
        _repair(digs, pq, lambda n: inside[n])
        if markov_validate(digs, pq) is not None:
            raise ScheduleInfeasible(f"window digits of {id} break the Markov condition")
        out[id] = DigitRule.explicit(digs, _phase_pattern(ph) if id != "b1" else _phase_pattern(1))
    return out["b1"], out["b2"], out["b3"], out["b4"]


def d2r4_spec(pq: PartialQuotients, rules: Sequence[DigitRule]) -> SystemSpec:
    items = [(f"b{i}", r) for i, r in enumerate(rules, start=1)]
    pts = sort_points(make_points(pq, items))
    E, I = EXCHANGE, IDENTITY2
    return SystemSpec(pq, tuple(pts), (E, I, E, I, E), "d2r4")
