"""Certified orbit labelling.

Orbits are run in 64-bit fixed point by the kernels.  A step whose
position is within the accumulated rounding error of a cut is flagged
and relabelled with exact comparisons, so the returned labels are exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from . import kernels
from .exactnum import (
    ALPHA,
    FIXED_ONE,
    PartialQuotients,
    ZAlphaElement,
    as_element,
    fixed_of_fraction,
    frac,
    sign,
    to_fixed,
)
from .ostrowski import MarkedPoint

Point = Union[ZAlphaElement, Fraction, int]
Cut = Union[MarkedPoint, ZAlphaElement]

# Rounding budget in units of 2**-64: initial point and cuts carry at most
# two units each, and every step adds at most two.
TOL0 = 8
TOL_STEP = 2


def alpha_fixed(pq: PartialQuotients) -> int:
    cached = getattr(pq, "_alpha_fixed", None)
    if cached is None:
        cached = to_fixed(ALPHA, pq)
        pq._alpha_fixed = cached  # type: ignore[attr-defined]
    return cached


def point_fixed(x: Point | MarkedPoint, pq: PartialQuotients) -> int:
    if isinstance(x, MarkedPoint):
        if x.is_one_minus_alpha:
            return to_fixed(ZAlphaElement(1, -1), pq)
        return x.fixed()
    if isinstance(x, (int, Fraction)):
        return fixed_of_fraction(Fraction(x))
    if x.v == 0:
        return fixed_of_fraction(Fraction(x.u))
    return to_fixed(x, pq)


def cut_compare(pos: ZAlphaElement, cut: Cut, pq: PartialQuotients) -> int:
    """sign(pos - cut)."""
    if isinstance(cut, MarkedPoint):
        return cut.compare(pos)
    return sign(pos - cut, pq)


def exact_label(pos: ZAlphaElement, cuts: Sequence[Cut], pq: PartialQuotients,
                left_limit: bool = False) -> int:
    """Number of cuts at or left of pos (strictly left for a left limit)."""
    if left_limit and pos.is_zero():
        return len(cuts)
    count = 0
    for c in cuts:
        s = cut_compare(pos, c, pq)
        if s > 0 or (s == 0 and not left_limit):
            count += 1
        else:
            break
    return count


def cuts_fixed(cuts: Sequence[Cut], pq: PartialQuotients) -> np.ndarray:
    return np.array([0] + [point_fixed(c, pq) for c in cuts], dtype=np.uint64)


def orbit_labels(x: Point, pq: PartialQuotients, cuts: Sequence[Cut], n: int,
                 left_limit: bool = False, cut_fp: np.ndarray | None = None,
                 x_fp: int | None = None) -> np.ndarray:
    """Exact labels of R^k x for k < n against sorted cuts in (0, 1)."""
    x = as_element(x)
    fp = cut_fp if cut_fp is not None else cuts_fixed(cuts, pq)
    x0 = x_fp if x_fp is not None else point_fixed(x, pq)
    labels, flags, nflag = kernels.orbit_labels(x0, alpha_fixed(pq), fp, n, TOL0, TOL_STEP)
    if nflag:
        # a left limit differs from the plain label only at a cut, and a
        # step at a cut is always flagged
        for k in np.flatnonzero(flags).tolist():
            pos = frac(x + ALPHA * k, pq)
            labels[k] = exact_label(pos, cuts, pq, left_limit)
    return labels


def random_dyadics(rng: np.random.Generator, count: int, lo: int = 0, hi: int = FIXED_ONE) -> list[Fraction]:
    """``count`` exact points m / 2**64 with lo <= m < hi."""
    span = hi - lo
    return [Fraction(lo + int.from_bytes(rng.bytes(8), "little") % span, FIXED_ONE) for _ in range(count)]
