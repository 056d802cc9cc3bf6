"""Symbolic language of the rotation and marked codings.

Cylinders of length n are the arcs cut out by the preimages R^{-k} of
the partition boundaries for k < n.  Boundaries are kept with their
symbolic origin: ``("0", k)`` is -k*alpha and ``(id, k)`` is
beta_id - k*alpha.  The point 1 - alpha is -alpha, so its preimages
are folded into origin "0".

Factor sets come from tower names: once every name is at least n long,
each length-n factor lies inside two consecutive names.
"""

from __future__ import annotations

import bisect
import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import Undecided
from .exactnum import (
    ALPHA,
    FIXED_MASK,
    FIXED_ONE,
    PartialQuotients,
    ZAlphaElement,
    frac,
    sign,
)
from .orbit import TOL0, TOL_STEP, alpha_fixed, orbit_labels, point_fixed
from .ostrowski import MarkedPoint
from .towers import build_towers, marked_pieces

ZERO_ORIGIN = "0"


@dataclass(frozen=True)
class Boundary:
    origin: str
    k: int
    fp: int


@dataclass(frozen=True)
class Cylinder:
    lo: Boundary
    hi: Boundary
    word: tuple[int, ...]
    length: tuple[Fraction, Fraction]


@dataclass(frozen=True)
class CylinderDecomposition:
    n: int
    cylinders: tuple[Cylinder, ...]

    def __len__(self) -> int:
        return len(self.cylinders)

    def words(self) -> set[tuple[int, ...]]:
        return {c.word for c in self.cylinders}

    def total_length(self) -> tuple[Fraction, Fraction]:
        return (sum(c.length[0] for c in self.cylinders), sum(c.length[1] for c in self.cylinders))


class _Boundaries:
    """Sorted boundary points on the circle in fixed point, with exact tie-breaking."""

    def __init__(self, spec, coding: str) -> None:
        self.pq: PartialQuotients = spec.pq
        self.coding = coding
        self.afp = alpha_fixed(self.pq)
        self.points: dict[str, MarkedPoint] = {}
        if coding == "rotation":
            self.origins: list[str] = [ZERO_ORIGIN]
            self.extra_zero = 1  # the cut 1 - alpha is the preimage of 0
        elif coding == "marked":
            self.origins = [ZERO_ORIGIN]
            self.extra_zero = 0
            for p in spec.points:
                if p.is_one_minus_alpha:
                    self.extra_zero = 1
                else:
                    self.origins.append(p.id)
                    self.points[p.id] = p
        else:
            raise ValueError(f"unknown coding {coding!r}")
        self.origin_fp = {o: (0 if o == ZERO_ORIGIN else point_fixed(self.points[o], self.pq)) for o in self.origins}
        self.keys: list[int] = []
        self.items: list[Boundary] = []
        self.seen: set[tuple[str, int]] = set()
        self.min_gap: int | None = None
        self.max_k = 0

    def tol(self, k: int) -> int:
        return TOL0 + TOL_STEP * k

    def exact(self, b: Boundary) -> ZAlphaElement:
        if b.origin == ZERO_ORIGIN:
            return frac(-ALPHA * b.k, self.pq)
        return frac(self.points[b.origin].representative() - ALPHA * b.k, self.pq)

    def _before(self, a: Boundary, b: Boundary) -> bool:
        """Exact order of two boundaries known to be close."""
        d = self.exact(b) - self.exact(a)
        # representatives lie within 2**-90 of their points
        s = sign(d, self.pq)
        if s != 0 and sign(d * s - Fraction(1, 1 << 86), self.pq) > 0:
            return s > 0
        raise Undecided(f"boundaries {a} and {b} cannot be separated")

    def add(self, origin: str, k: int) -> None:
        key = (origin, k)
        if key in self.seen:
            return
        self.seen.add(key)
        self.max_k = max(self.max_k, k)
        fp = (self.origin_fp[origin] - k * self.afp) & FIXED_MASK
        b = Boundary(origin, k, fp)
        i = bisect.bisect_left(self.keys, fp)
        tol = 2 * self.tol(self.max_k)
        # settle near-ties exactly
        while i > 0 and fp - self.keys[i - 1] <= tol and self._before(b, self.items[i - 1]):
            i -= 1
        while i < len(self.keys) and self.keys[i] - fp <= tol and self._before(self.items[i], b):
            i += 1
        self.keys.insert(i, fp)
        self.items.insert(i, b)
        m = len(self.keys)
        if m == 1:
            self.min_gap = FIXED_ONE
            return
        prev = self.keys[i - 1] if i > 0 else self.keys[-1] - FIXED_ONE
        nxt = self.keys[i + 1] if i + 1 < m else self.keys[0] + FIXED_ONE
        g = min(fp - prev, nxt - fp)
        self.min_gap = g if self.min_gap is None else min(self.min_gap, g)

    def add_level(self, k: int) -> None:
        """Preimages R^{-k} of every partition boundary."""
        for o in self.origins:
            self.add(o, k)
        if self.extra_zero:
            self.add(ZERO_ORIGIN, k + 1)

    def gap_enclosure(self, gap: int) -> tuple[Fraction, Fraction]:
        err = 2 * self.tol(self.max_k)
        return Fraction(max(gap - err, 0), FIXED_ONE), Fraction(gap + err, FIXED_ONE)


def _cuts(spec, coding: str) -> list:
    if coding == "rotation":
        return [ZAlphaElement(1, -1)]
    return list(spec.points)


def cylinders(spec, coding: str, n: int) -> CylinderDecomposition:
    """The length-n cylinders as arcs between consecutive boundaries."""
    bd = _Boundaries(spec, coding)
    bd.add(ZERO_ORIGIN, 0)
    for k in range(n):
        bd.add_level(k)
    cuts = _cuts(spec, coding)
    items = bd.items
    out = []
    for j, lo in enumerate(items):
        hi = items[(j + 1) % len(items)]
        gap = (hi.fp - lo.fp) & FIXED_MASK if len(items) > 1 else FIXED_ONE
        if gap == 0:
            gap = FIXED_ONE
        a = bd.exact(lo)
        width = bd.exact(hi) - a
        if sign(width, spec.pq) <= 0:
            width = width + 1
        mid = frac(a + width / 2, spec.pq)
        word = tuple(orbit_labels(mid, spec.pq, cuts, n).tolist()) if n else ()
        out.append(Cylinder(lo, hi, word, bd.gap_enclosure(gap)))
    return CylinderDecomposition(n, tuple(out))


def ne_series(spec, coding: str, N: int) -> list[tuple[int, Fraction, Fraction]]:
    """(n, lower, upper) enclosures of n * e_n for n = 1..N (Lebesgue measure)."""
    bd = _Boundaries(spec, coding)
    bd.add(ZERO_ORIGIN, 0)
    out = []
    for n in range(1, N + 1):
        bd.add_level(n - 1)
        lo, hi = bd.gap_enclosure(bd.min_gap if bd.min_gap is not None else FIXED_ONE)
        out.append((n, n * lo, n * hi))
    return out


# ---------------------------------------------------------------------------
# factors from tower names


def _arc_overlap(a: ZAlphaElement, u: ZAlphaElement, b: ZAlphaElement, w: ZAlphaElement, pq: PartialQuotients) -> bool:
    """Do the arcs [a, a+u) and [b, b+w) share a set of positive length?"""
    return sign(frac(b - a, pq) - u, pq) < 0 or sign(frac(a - b, pq) - w, pq) < 0


def _name_graph(spec, coding: str, m: int):
    """Tower names at level m and the pairs (i, j) with name j following name i."""
    pq = spec.pq
    st = build_towers(pq, m)
    if coding == "rotation":
        zero = ZAlphaElement(0, 0)
        pieces = [(t, zero, st.width(t)) for t in ("large", "small") if st.height(t)]
    else:
        pieces = marked_pieces(spec, m)
    cuts = _cuts(spec, coding)
    names = []
    arcs = []
    for tower, lo, hi in pieces:
        left = lo if st.offset_from_left else hi
        left_pt = st.point_at(tower, 0, left)
        width = hi - lo
        mid = st.point_at(tower, 0, (lo + hi) / 2)
        names.append(tuple(orbit_labels(mid, pq, cuts, st.height(tower)).tolist()))
        arcs.append((left_pt, width, st.height(tower)))
    succ = []
    for i, (a, u, h) in enumerate(arcs):
        top_image = frac(a + ALPHA * h, pq)
        for j, (b, w, _) in enumerate(arcs):
            if _arc_overlap(top_image, u, b, w, pq):
                succ.append((i, j))
    return names, succ


def _level_for_length(pq: PartialQuotients, n: int) -> int:
    m = 1
    while pq.q(m - 1) < max(n, 1):
        m += 1
    return m


def factors(spec, coding: str, n: int, horizon: int | None = None) -> set[tuple[int, ...]]:
    """All length-n words of the coding's language."""
    if n == 0:
        return {()}
    m = _level_for_length(spec.pq, n) if horizon is None else horizon
    names, succ = _name_graph(spec, coding, m)
    out: set[tuple[int, ...]] = set()
    for i, j in succ:
        w = names[i] + names[j]
        for s in range(len(names[i])):
            out.add(w[s:s + n])
    return out


def complexity(spec, coding: str, n: int) -> int:
    return len(factors(spec, coding, n))


@dataclass(frozen=True)
class Specials:
    right_special: frozenset
    left_special: frozenset
    bispecial: frozenset


def specials(spec, coding: str, n: int) -> Specials:
    longer = factors(spec, coding, n + 1)
    right: dict[tuple, set] = {}
    left: dict[tuple, set] = {}
    for w in longer:
        right.setdefault(w[:-1], set()).add(w[-1])
        left.setdefault(w[1:], set()).add(w[0])
    rs = frozenset(w for w, e in right.items() if len(e) > 1)
    ls = frozenset(w for w, e in left.items() if len(e) > 1)
    return Specials(rs, ls, rs & ls)


@dataclass(frozen=True)
class BslrReport:
    conforms: bool
    continuations: tuple[tuple[int, ...], ...]
    violation: str | None


def bslr_check(spec, coding: str, W: Sequence[int], U_horizon: int) -> BslrReport:
    """Check the two-continuation structure of a bispecial word W."""
    W = tuple(W)
    sp = specials(spec, coding, len(W))
    if W not in sp.bispecial:
        raise ValueError("W is not bispecial in the computed language")
    L = len(W) + U_horizon
    conts = sorted({w[len(W):] for w in factors(spec, coding, L) if w[:len(W)] == W})
    if len(conts) > 2:
        return BslrReport(False, tuple(conts), f"{len(conts)} continuations of length {U_horizon}")
    if len(conts) == 2:
        u1, u2 = conts
        if u1[0] == u2[0]:
            return BslrReport(False, tuple(conts), "continuations share their first letter")
        for pos in range(2, U_horizon):
            if u1[pos] != u2[pos]:
                return BslrReport(False, tuple(conts), f"continuations differ again at letter {pos + 1}")
    return BslrReport(True, tuple(conts), None)
