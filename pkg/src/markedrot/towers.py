"""Rokhlin towers of the rotation and placement of points inside them.

At every level n the circle is the union of a large tower (q_n levels
of width alpha_{n-1}) and a small tower (q_{n-1} levels of width
alpha_n).  The coordinates of the two bases are the only place where
the parity of n matters; they live in :data:`_BASES`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from . import kernels
from .errors import NotFound, Undecided
from .exactnum import (
    ALPHA,
    PartialQuotients,
    ZAlphaElement,
    as_element,
    frac,
    sign,
)
from .orbit import alpha_fixed, orbit_labels, point_fixed
from .ostrowski import AlphaInterval, column_of, position_stats, trace

# lower endpoint of (large basis, small basis) from alpha, alpha_{n-1}, alpha_n
_BASES: dict[int, Callable[[ZAlphaElement, ZAlphaElement, ZAlphaElement], tuple[ZAlphaElement, ZAlphaElement]]] = {
    1: lambda a, prev, cur: (a - prev + cur, a - prev),
    0: lambda a, prev, cur: (a - cur, a - cur + prev),
}


@dataclass(frozen=True)
class TowerState:
    n: int
    parity: int
    q_large: int
    q_small: int
    w_large: ZAlphaElement
    w_small: ZAlphaElement
    columns: int
    large_base: AlphaInterval
    small_base: AlphaInterval
    pq: PartialQuotients

    @property
    def offset_from_left(self) -> bool:
        return self.parity == 1

    def base(self, tower: str) -> AlphaInterval:
        return self.large_base if tower == "large" else self.small_base

    def height(self, tower: str) -> int:
        return self.q_large if tower == "large" else self.q_small

    def width(self, tower: str) -> ZAlphaElement:
        return self.w_large if tower == "large" else self.w_small

    def point_at(self, tower: str, level: int, offset: ZAlphaElement) -> ZAlphaElement:
        """The circle point at ``offset`` in the given level."""
        b = self.base(tower)
        p = b.lo + offset if self.offset_from_left else b.hi - offset
        return frac(p + ALPHA * level, self.pq)

    def level_interval(self, tower: str, level: int) -> AlphaInterval:
        lo = frac(self.base(tower).lo + ALPHA * level, self.pq)
        return AlphaInterval(lo, lo + self.width(tower))

    def column_interval(self, c: int) -> AlphaInterval:
        """Column c of the large basis, as a subinterval of the circle."""
        an = self.pq.alpha_n(self.n)
        a = self.columns - 1
        lo_off = an * c
        hi_off = an * (c + 1) if c < a else self.w_large
        b = self.large_base
        if self.offset_from_left:
            return AlphaInterval(b.lo + lo_off, b.lo + hi_off)
        return AlphaInterval(b.hi - hi_off, b.hi - lo_off)


def build_towers(pq: PartialQuotients, n: int) -> TowerState:
    """Geometry of the two n-towers."""
    if n < 0:
        raise ValueError("tower levels start at 0")
    prev, cur = pq.alpha_n(n - 1), pq.alpha_n(n)
    lo_l, lo_s = _BASES[n % 2](ALPHA, prev, cur)
    return TowerState(
        n=n,
        parity=n % 2,
        q_large=pq.q(n),
        q_small=pq.q(n - 1),
        w_large=prev,
        w_small=cur,
        columns=pq[n + 1] + 1,
        large_base=AlphaInterval(lo_l, lo_l + prev),
        small_base=AlphaInterval(lo_s, lo_s + cur),
        pq=pq,
    )


@dataclass(frozen=True)
class Location:
    tower: str
    level: int
    offset: ZAlphaElement
    column: int

    @property
    def y(self) -> int:
        """Level counted through both towers (small levels follow the large ones)."""
        return self.level


def locate(point: ZAlphaElement | Fraction | int, pq: PartialQuotients, n: int) -> Location:
    """Placement of a point in the n-towers by descending through the columns."""
    rec = trace(point, pq, n + 1)[n]
    tower = "small" if rec.small else "large"
    return Location(tower, rec.y, rec.x, rec.column)


def _level_hits(g: int, w: int, height: int, exact_member: Callable[[int], bool], pq: PartialQuotients) -> list[int]:
    hits = []
    k = 0
    a = alpha_fixed(pq)
    while k < height:
        k, status = kernels.first_hit(g, a, w, k, height, 16, 2)
        if status < 0:
            break
        if status == 0 or exact_member(k):
            hits.append(k)
        k += 1
    return hits


def locate_bruteforce(point: ZAlphaElement | Fraction | int, pq: PartialQuotients, n: int) -> Location:
    """Placement found by testing every level of both towers.

    Independent of the digit recursion: the point is pulled back by R^h
    for every h below the tower height and tested against the bases.
    """
    p = frac(as_element(point), pq)
    st = build_towers(pq, n)
    pf = point_fixed(p, pq)
    found: list[tuple[str, int]] = []
    for tower in ("large", "small"):
        base = st.base(tower)
        height = st.height(tower)
        if height == 0:
            continue
        g = (pf - point_fixed(base.lo, pq)) % (1 << 64)
        w = point_fixed(st.width(tower), pq) if sign(st.width(tower) - 1, pq) < 0 else (1 << 64) - 1

        def member(h: int, base=base) -> bool:
            return base.contains(frac(p - ALPHA * h, pq), pq)

        for h in _level_hits(g, w, height, member, pq):
            found.append((tower, h))
    if len(found) != 1:
        raise Undecided(f"point placed {len(found)} times in the {n}-towers")
    tower, h = found[0]
    base = st.base(tower)
    b = frac(p - ALPHA * h, pq)
    offset = b - base.lo if st.offset_from_left else base.hi - b
    if tower == "small":
        return Location("small", st.q_large + h, offset, 0)
    col = None
    for c in range(st.columns):
        if st.column_interval(c).contains(b, pq):
            col = c
            break
    if col is None:
        raise Undecided("basis point outside every column")
    return Location("large", h, offset, col)


def straddle_time(x, y, gamma, pq: PartialQuotients, max_k: int) -> int:
    """Smallest k > 0 with gamma in [R^k y, R^k x), where x = y + z, 0 < z < 1.

    Raises :class:`NotFound` when no such k < max_k exists.
    """
    x, y, gamma = as_element(x), as_element(y), as_element(gamma)
    z = x - y
    if not (sign(z, pq) > 0 and sign(z - 1, pq) < 0):
        raise ValueError("need x = y + z with 0 < z < 1")
    g = point_fixed(frac(gamma - y, pq), pq)
    zf = point_fixed(z, pq)
    a = alpha_fixed(pq)
    k = 1
    while k < max_k:
        k, status = kernels.first_hit(g, a, zf, k, max_k, 16, 2)
        if status < 0:
            break
        if status == 0:
            return k
        f = frac(gamma - y - ALPHA * k, pq)
        if sign(f - z, pq) < 0:
            return k
        k += 1
    raise NotFound(max_k)


# ---------------------------------------------------------------------------
# names


@dataclass(frozen=True)
class TowerName:
    word: tuple
    coding: str
    tower: str
    piece: int = 0
    sheet: int | None = None

    def __len__(self) -> int:
        return len(self.word)


def _basis_midpoint(st: TowerState, tower: str, lo_off: ZAlphaElement, hi_off: ZAlphaElement) -> ZAlphaElement:
    return st.point_at(tower, 0, (lo_off + hi_off) / 2)


def rotation_names(pq: PartialQuotients, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(P_n, M_n) read off the towers for the coding by [0, 1-alpha), [1-alpha, 1)."""
    if n < 1:
        raise ValueError("rotation names start at n = 1")
    st = build_towers(pq, n)
    cut = [ZAlphaElement(1, -1)]
    zero = ZAlphaElement(0, 0)
    words = []
    for tower in ("large", "small"):
        mid = _basis_midpoint(st, tower, zero, st.width(tower))
        words.append(tuple(orbit_labels(mid, pq, cut, st.height(tower)).tolist()))
    return words[0], words[1]


def rotation_names_recursive(pq: PartialQuotients, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(P_n, M_n) from P_1 = 0^{a_1-1} 1, M_1 = 0 and the stacking rule."""
    P: tuple[int, ...] = (0,) * (pq[1] - 1) + (1,)
    M: tuple[int, ...] = (0,)
    for k in range(1, n):
        P, M = P * pq[k + 1] + M, P
    return P, M


def marked_pieces(spec, n: int) -> list[tuple[str, ZAlphaElement, ZAlphaElement]]:
    """Pieces (tower, lo offset, hi offset) cut out by the verticals of the marked points.

    Pieces of a tower are listed in circle order from its left side, and
    numbered from right to left at odd n.
    """
    pq = spec.pq
    st = build_towers(pq, n)
    cuts: dict[str, list[ZAlphaElement]] = {"large": [], "small": []}
    for b in spec.points:
        if b.is_one_minus_alpha:
            continue
        ps = position_stats(b, pq, n)
        cuts[ps.tower].append(ps.x)
    out = []
    for tower in ("large", "small"):
        if st.height(tower) == 0:
            continue
        w = st.width(tower)
        offs = sorted(cuts[tower], key=lambda e: e.approx(pq))
        offs = _sort_exact(offs, pq)
        bounds = [ZAlphaElement(0, 0)] + offs + [w]
        pieces = [(tower, bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
        # offsets run rightward at odd n and leftward at even n
        if not st.offset_from_left:
            pieces.reverse()
        if n % 2 == 1:
            pieces.reverse()
        out.extend(pieces)
    return out


def _sort_exact(xs: list[ZAlphaElement], pq: PartialQuotients) -> list[ZAlphaElement]:
    import functools

    return sorted(xs, key=functools.cmp_to_key(lambda a, b: sign(a - b, pq)))


def tower_names(spec, n: int, coding: str = "natural") -> list[TowerName]:
    """Names of the n-towers for the rotation, marked or lifted coding."""
    from .system import marked_cuts, sheet_path

    pq = spec.pq
    if coding == "natural":
        P, M = rotation_names(pq, n)
        return [TowerName(P, "natural", "large"), TowerName(M, "natural", "small")]
    st = build_towers(pq, n)
    names = []
    cuts = marked_cuts(spec)
    for idx, (tower, lo, hi) in enumerate(marked_pieces(spec, n)):
        mid = st.point_at(tower, 0, (lo + hi) / 2)
        labels = orbit_labels(mid, pq, cuts, st.height(tower))
        if coding == "marked":
            names.append(TowerName(tuple(labels.tolist()), "marked", tower, idx))
        elif coding == "lifted":
            for s in range(1, spec.d + 1):
                sheets = sheet_path(spec, labels, s)
                word = tuple(zip(sheets[:-1].tolist(), labels.tolist()))
                names.append(TowerName(word, "lifted", tower, idx, s))
        else:
            raise ValueError(f"unknown coding {coding!r}")
    return names


def name_for_level(names: Sequence[TowerName], word: Sequence) -> bool:
    w = tuple(word)
    L = len(w)
    return any(
        any(nm.word[i:i + L] == w for i in range(len(nm.word) - L + 1)) for nm in names
    )
