"""Finite-depth digit criteria and the verdict engine.

Every criterion is an asymptotic statement about the digit sequences
b_n(beta_i).  At depth N they are evaluated as observed evidence: runs
are "bounded" when they stay below a threshold and stop growing between
N/2 and N, and isolation is checked over windows [n - M, n].  Verdicts
always carry the finite-depth caveat.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import NotMinimal
from .system import SystemSpec, minimality_check, product_inequality

ALPHA_ID = "alpha"


# ---------------------------------------------------------------------------
# digit tables


@dataclass(frozen=True)
class DigitTable:
    """a_1..a_N and b_1..b_N of every point other than 1 - alpha."""

    depth: int
    a: tuple[int, ...]
    digits: dict[str, tuple[int, ...]]

    def b(self, id: str, n: int) -> int:
        return self.digits[id][n - 1]

    def an(self, n: int) -> int:
        return self.a[n - 1]

    @property
    def ids(self) -> list[str]:
        return list(self.digits)


def digit_table(spec: SystemSpec, N: int) -> DigitTable:
    a = tuple(spec.pq.terms(N))
    return DigitTable(N, a, {p.id: p.digits(N) for _, p in spec.digit_points()})


def _resolve(spec: SystemSpec, who: str | int) -> str:
    if who == ALPHA_ID:
        return ALPHA_ID
    if isinstance(who, int):
        return spec.points[who - 1].id
    return who


# ---------------------------------------------------------------------------
# runs


def _max_run(flags: Iterable[bool]) -> int:
    best = cur = 0
    for f in flags:
        cur = cur + 1 if f else 0
        best = max(best, cur)
    return best


@dataclass(frozen=True)
class RunReport:
    depth: int
    max_pq: int
    run_a_minus_1: dict[str, int]
    run_a_even: dict[str, int]
    run_a_odd: dict[str, int]
    run_equal: dict[tuple[str, str], int]

    def maxima(self) -> dict[str, int]:
        """Largest observed run per bullet, plus the largest partial quotient."""
        def top(d: dict) -> int:
            return max(d.values(), default=0)

        return {
            "pq": self.max_pq,
            "a_minus_1": top(self.run_a_minus_1),
            "a_parity": max(top(self.run_a_even), top(self.run_a_odd)),
            "equal": top(self.run_equal),
        }


def run_report(spec: SystemSpec, N: int, table: DigitTable | None = None) -> RunReport:
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    a = tb.a[:N]
    ids = tb.ids
    am1, ev, od = {}, {}, {}
    for i in ids:
        b = tb.digits[i][:N]
        am1[i] = _max_run(b[k] == a[k] - 1 for k in range(N))
        # runs over consecutive even (resp. odd) indices n = k + 1
        ev[i] = _max_run(b[k] == a[k] for k in range(1, N, 2))
        od[i] = _max_run(b[k] == a[k] for k in range(0, N, 2))
    eq = {}
    for x in range(len(ids)):
        for y in range(x + 1, len(ids)):
            bi, bj = tb.digits[ids[x]], tb.digits[ids[y]]
            eq[(ids[x], ids[y])] = _max_run(bi[k] == bj[k] for k in range(N))
    return RunReport(N, max(a, default=0), am1, ev, od, eq)


class LRStatus(str, Enum):
    CONSISTENT = "consistent_LR"
    INCONSISTENT = "inconsistent_LR"


@dataclass(frozen=True)
class LRCheck:
    report: RunReport
    half: RunReport
    status: LRStatus
    violated: tuple[str, ...]

    @property
    def consistent(self) -> bool:
        return self.status is LRStatus.CONSISTENT


def _grows(full: int, half: int) -> bool:
    return full > half + 1 and full >= 4


def linear_recurrence_check(spec: SystemSpec, N: int, K_run: int | None = None,
                            K_pq: int = 20, table: DigitTable | None = None) -> LRCheck:
    """Observed boundedness of the four linear recurrence bullets to depth N.

    A bullet is violated when its largest run exceeds ``K_run`` (default
    N/8) or grows between depth N/2 and depth N.
    """
    K = K_run if K_run is not None else max(N // 8, 1)
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    full = run_report(spec, N, tb)
    half = run_report(spec, max(N // 2, 1), tb)
    fm, hm = full.maxima(), half.maxima()
    violated = []
    if fm["pq"] > K_pq or _grows(fm["pq"], hm["pq"]):
        violated.append("bounded partial quotients")
    if fm["a_minus_1"] > K or _grows(fm["a_minus_1"], hm["a_minus_1"]):
        violated.append("runs of b_n = a_n - 1")
    if fm["a_parity"] > K or _grows(fm["a_parity"], hm["a_parity"]):
        violated.append("runs of b_n = a_n at one parity")
    if fm["equal"] > K or _grows(fm["equal"], hm["equal"]):
        violated.append("runs of equal digits of two points")
    status = LRStatus.INCONSISTENT if violated else LRStatus.CONSISTENT
    return LRCheck(full, half, status, tuple(violated))


# ---------------------------------------------------------------------------
# isolation


def _window(n: int, M: int) -> range:
    return range(max(1, n - M), n + 1)


def _self_clauses(tb: DigitTable, id: str, n: int, M: int) -> list[str]:
    """The failed clauses among the three digit conditions of one point."""
    w = _window(n, M)
    fails = []
    if not any(tb.b(id, m) != tb.an(m) - 1 for m in w):
        fails.append(f"{id}: b = a - 1 on the window")
    if not any(tb.b(id, m) != tb.an(m) for m in w if m % 2 == 1):
        fails.append(f"{id}: b = a at every odd index")
    if not any(tb.b(id, m) != tb.an(m) for m in w if m % 2 == 0):
        fails.append(f"{id}: b = a at every even index")
    return fails


def isolation_failures(spec: SystemSpec, who: str | int, n: int, M: int,
                       table: DigitTable | None = None) -> list[str]:
    """Clauses of the (n, M)-isolation definition that fail; empty when isolated."""
    who = _resolve(spec, who)
    tb = table if table is not None and table.depth >= n else digit_table(spec, n)
    if who == ALPHA_ID:
        out: list[str] = []
        for i in tb.ids:
            out.extend(_self_clauses(tb, i, n, M))
        return out
    if who not in tb.digits:
        raise ValueError(f"{who!r} is not a point with digits")
    out = _self_clauses(tb, who, n, M)
    w = _window(n, M)
    for i in tb.ids:
        if i != who and not any(tb.b(who, m) != tb.b(i, m) for m in w):
            out.append(f"{who}: digits equal to {i} on the window")
    return out


def isolated(spec: SystemSpec, who: str | int, n: int, M: int,
             table: DigitTable | None = None) -> bool:
    """Is ``who`` (a point id, 1-based index or "alpha") (n, M)-isolated?"""
    return not isolation_failures(spec, who, n, M, table)


@dataclass(frozen=True)
class IsolationScan:
    holds: bool
    first_failure: int | None
    pattern: tuple[str, ...]
    witnesses: tuple[str, ...]
    start: int


def always_isolated_scan(spec: SystemSpec, M: int, N: int, include_alpha: bool = False,
                         table: DigitTable | None = None) -> IsolationScan:
    """Check that some point (or alpha) is (n, M)-isolated for M < n <= N.

    The scan starts at n = M + 1 so that every window is complete.
    ``witnesses[k]`` names the isolated point found at n = start + k.
    """
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    start = M + 1
    found: list[str] = []
    candidates = tb.ids + ([ALPHA_ID] if include_alpha else [])
    for n in range(start, N + 1):
        fails: list[str] = []
        w = None
        for c in candidates:
            f = isolation_failures(spec, c, n, M, tb)
            if not f:
                w = c
                break
            fails.extend(f)
        if w is None:
            return IsolationScan(False, n, tuple(fails), tuple(found), start)
        found.append(w)
    return IsolationScan(True, None, (), tuple(found), start)


# ---------------------------------------------------------------------------
# clustering on alpha


@dataclass(frozen=True)
class Window:
    m: int
    length: int

    @property
    def end(self) -> int:
        return self.m + self.length


def _run_ends(flags: Sequence[bool]) -> list[int]:
    """end[m] = last index of the run of True starting at m (m - 1 if none), 1-based."""
    N = len(flags)
    end = [0] * (N + 2)
    end[N + 1] = N
    for m in range(N, 0, -1):
        end[m] = end[m + 1] if flags[m - 1] and m < N and flags[m] else (m if flags[m - 1] else m - 1)
    return end


def cluster_on_alpha_detect(spec: SystemSpec, N: int, W: int,
                            table: DigitTable | None = None) -> list[Window]:
    """Maximal windows [m, m + L] on which every point follows one clustering pattern.

    The patterns are b_n = a_n - 1 throughout, b_n = a_n at every even n,
    and b_n = a_n at every odd n.  Windows with L >= W are returned.
    """
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    if not tb.ids:
        return [Window(1, N - 1)] if N - 1 >= W else []
    reach = [N] * (N + 1)
    for i in tb.ids:
        b = tb.digits[i]
        pats = (
            [b[k] == tb.a[k] - 1 for k in range(N)],
            [(k + 1) % 2 == 1 or b[k] == tb.a[k] for k in range(N)],
            [(k + 1) % 2 == 0 or b[k] == tb.a[k] for k in range(N)],
        )
        ends = [_run_ends(p) for p in pats]
        for m in range(1, N + 1):
            reach[m] = min(reach[m], max(e[m] for e in ends))
    out = []
    for m in range(1, N + 1):
        e = reach[m]
        if e < m:
            continue
        if m > 1 and reach[m - 1] >= e:
            continue
        if e - m >= W:
            out.append(Window(m, e - m))
    return out


def clusters_grow(windows: Sequence[Window], N: int, W: int) -> bool:
    """Windows of length >= W whose lengths keep increasing with depth."""
    if not windows:
        return False
    early = max((w.length for w in windows if w.m <= N // 2), default=0)
    late = max((w.length for w in windows if w.m > N // 2), default=0)
    return late >= W and late > early


# ---------------------------------------------------------------------------
# unique ergodicity


@dataclass(frozen=True)
class UEResult:
    holds: bool
    witnesses: tuple[int, ...]


def unique_ergodicity_sufficient(spec: SystemSpec, M_bar: int, N: int,
                                 table: DigitTable | None = None) -> UEResult:
    """Levels p_k <= N where alpha and every point are (p_k, M_bar)-isolated.

    Witnesses are taken greedily with gaps larger than M_bar; three or
    more count as an infinite sequence at this depth.
    """
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    wit: list[int] = []
    for n in range(M_bar + 1, N + 1):
        if wit and n - wit[-1] <= M_bar:
            continue
        if isolation_failures(spec, ALPHA_ID, n, M_bar, tb):
            continue
        if all(not isolation_failures(spec, i, n, M_bar, tb) for i in tb.ids):
            wit.append(n)
    return UEResult(len(wit) >= 3, tuple(wit))


# ---------------------------------------------------------------------------
# the four-point example at d = 2


@dataclass(frozen=True)
class D2R4Audit:
    passes: bool
    bullets: tuple[bool, bool, bool, bool, bool]
    roles: dict[str, str]
    schedule: tuple[Window, ...]
    reason: str | None = None


def _equal_windows(tb: DigitTable, b1: str, others: Sequence[str], N: int, min_len: int) -> list[Window]:
    flags = [
        tb.b(b1, n) == tb.an(n) - 1 and len({tb.b(o, n) for o in others}) == 1
        for n in range(1, N + 1)
    ]
    out = []
    n = 1
    while n <= N:
        if flags[n - 1]:
            m = n
            while n < N and flags[n]:
                n += 1
            if n - m >= min_len:
                out.append(Window(m, n - m))
        n += 1
    return out


def _bullets(tb: DigitTable, b2: str, sched: Sequence[Window], M0: int, N: int) -> tuple[bool, bool, bool]:
    """Bullets 2-4 for beta_2 over [m_k, m_k + N_k + M_0]."""
    ok = [True, True, True]
    for w in sched:
        for n in range(w.m, min(w.end + M0, N) + 1):
            win = _window(n, M0)
            if not any(tb.b(b2, m) != tb.an(m) - 1 for m in win):
                ok[0] = False
            if not any(tb.b(b2, m) != tb.an(m) for m in win if m % 2 == 0):
                ok[1] = False
            if not any(tb.b(b2, m) != tb.an(m) for m in win if m % 2 == 1):
                ok[2] = False
    return ok[0], ok[1], ok[2]


def d2r4_audit(spec: SystemSpec, N: int, M0: int, table: DigitTable | None = None) -> D2R4Audit:
    """Check the five digit hypotheses of the four-point d = 2 example.

    The schedule m_k, N_k is read off the digits as the maximal windows
    (of length at least M_0) where one point has b_n = a_n - 1 and the
    other three agree; the roles beta_1 and beta_2 are found by search.
    """
    none = (False,) * 5
    if spec.d != 2 or spec.r != 4 or spec.t is not None:
        return D2R4Audit(False, none, {}, (), "needs d = 2 and four points other than 1 - alpha")
    tb = table if table is not None and table.depth >= N else digit_table(spec, N)
    ids = tb.ids
    best: D2R4Audit | None = None
    for b1 in ids:
        rest = [i for i in ids if i != b1]
        sched = _equal_windows(tb, b1, rest, N, M0)
        lengths = [w.length for w in sched]
        b1_ok = (
            len(sched) >= 2
            and all(x.end < y.m for x, y in zip(sched, sched[1:]))
            and all(x < y for x, y in zip(lengths, lengths[1:]))
        )
        for b2 in rest:
            b234 = _bullets(tb, b2, sched, M0, N) if sched else (False, False, False)
            gaps_ok = bool(sched)
            bounds = [(x.end + M0, y.m) for x, y in zip(sched, sched[1:])]
            if sched:
                bounds.append((sched[-1].end + M0, N))
            for lo, hi in bounds:
                for n in range(lo, min(hi, N) + 1):
                    if isolation_failures(spec, b2, n, M0, tb):
                        gaps_ok = False
                        break
                if not gaps_ok:
                    break
            bullets = (b1_ok, *b234, gaps_ok)
            roles = {"beta_1": b1, "beta_2": b2}
            cand = D2R4Audit(all(bullets), bullets, roles, tuple(sched))
            if cand.passes:
                return cand
            if best is None or sum(cand.bullets) > sum(best.bullets):
                best = cand
    assert best is not None
    return D2R4Audit(False, best.bullets, best.roles, best.schedule, "some hypothesis fails")


# ---------------------------------------------------------------------------
# verdict


class VerdictValue(str, Enum):
    RIGID = "RIGID"
    NON_RIGID = "NON_RIGID"
    UNKNOWN = "UNKNOWN"


TAGS = ("unbounded-pq-rigid", "ostlr+nrig", "nrig", "tcom", "3r", "d2-case", "d2r4", "none")


@dataclass(frozen=True)
class Thresholds:
    K_pq: int = 20
    K_run: int | None = None
    W: int = 4
    M0: int = 6


@dataclass(frozen=True)
class Verdict:
    value: VerdictValue
    tag: str
    witness: dict = field(default_factory=dict)
    caveat: str = "finite-depth"
    lr: LRCheck | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise ValueError(f"unknown theorem tag {self.tag!r}")
        if self.value is not VerdictValue.UNKNOWN and (self.tag == "none" or not self.witness):
            raise ValueError("a decided verdict needs a theorem tag and witness data")


def _all_commute(spec: SystemSpec) -> bool:
    ps = spec.perms
    return all(a * b == b * a for a in ps for b in ps)


def verdict(spec: SystemSpec, N: int = 200, M: int = 6, thresholds: Thresholds | None = None) -> Verdict:
    """Map the criteria evaluated at depth N to a verdict with its theorem tag."""
    th = thresholds or Thresholds()
    if not minimality_check(spec.perms, spec.d):
        raise NotMinimal("the permutations leave a proper set of sheets invariant")
    tb = digit_table(spec, N)
    base = {"depth": N, "M": M}
    lr = linear_recurrence_check(spec, N, th.K_run, th.K_pq, tb)

    # (1) unbounded partial quotients
    if lr.report.max_pq > th.K_pq:
        return Verdict(VerdictValue.RIGID, "unbounded-pq-rigid", {**base, "max_pq": lr.report.max_pq}, lr=lr)

    # (2) some point, or alpha under the product inequality, always isolated
    scan = always_isolated_scan(spec, M, N, table=tb)
    if not scan.holds and product_inequality(spec):
        scan = always_isolated_scan(spec, M, N, include_alpha=True, table=tb)
    if scan.holds:
        tag = "ostlr+nrig" if lr.consistent else "nrig"
        return Verdict(VerdictValue.NON_RIGID, tag, {**base, "branch": "alpha" if ALPHA_ID in scan.witnesses else "beta"}, lr=lr)

    # (3) commuting permutations and growing clusters on alpha
    windows = cluster_on_alpha_detect(spec, N, th.W, tb)
    if _all_commute(spec) and clusters_grow(windows, N, th.W):
        return Verdict(VerdictValue.RIGID, "tcom", {**base, "windows": [(w.m, w.length) for w in windows]}, lr=lr)
    if spec.construction == "rigid3":
        from .rigidity import rigid3_signature_check

        ok, levels = rigid3_signature_check(spec, min(N, 40))
        if ok:
            return Verdict(VerdictValue.RIGID, "3r", {**base, "scheduled_levels": list(levels)}, lr=lr)

    # (4) the d = 2 table
    if spec.d == 2:
        k = len(spec.digit_points())
        w = {**base, "first_failure": scan.first_failure}
        if k == 1:
            if lr.consistent:
                return Verdict(VerdictValue.NON_RIGID, "ostlr+nrig", w, lr=lr)
            return Verdict(VerdictValue.RIGID, "d2-case", {**w, "violated": list(lr.violated)}, lr=lr)
        if k in (2, 3) and spec.r <= 4:
            return Verdict(VerdictValue.RIGID, "d2-case", w, lr=lr)
        if spec.r == 4 and spec.t is None:
            audit = d2r4_audit(spec, N, th.M0, tb)
            if audit.passes:
                sched = [(s.m, s.length) for s in audit.schedule]
                return Verdict(VerdictValue.NON_RIGID, "d2r4", {**base, "M0": th.M0, "schedule": sched, "roles": audit.roles}, lr=lr)
    return Verdict(VerdictValue.UNKNOWN, "none", base, lr=lr)
