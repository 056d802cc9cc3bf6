"""Exact arithmetic in Z + Z*alpha.

The rotation number alpha is carried by its partial quotients.  Every
quantity the rest of the package needs (tower widths, orbit offsets, the
marked points' partial sums) is an element ``u + v*alpha`` and all
comparisons reduce to :func:`sign`, which is decided with rational
enclosures of alpha coming from consecutive convergents.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import DepthExceeded

Scalar = Union[int, Fraction]

FIXED_BITS = 64
FIXED_ONE = 1 << FIXED_BITS
FIXED_MASK = FIXED_ONE - 1

# Search cap for sign() on a periodic alpha.  An element whose sign is not
# settled by convergents of this index would need coefficients far larger
# than anything the package produces.
_SIGN_DEPTH_CAP = 1 << 14


def _norm(c: Scalar) -> Scalar:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class PartialQuotients:
    """Continued fraction ``alpha = [0; a_1, a_2, ...]``.

    Three modes are supported: an eventually periodic sequence (``prefix``
    followed by ``period`` repeated), and a rational-approximation mode
    built from an exact rational whose expansion is trusted only up to
    ``trust_depth`` terms.
    """

    def __init__(
        self,
        prefix: Sequence[int] = (),
        period: Sequence[int] | None = None,
        *,
        rational: Fraction | None = None,
        trust_depth: int | None = None,
    ) -> None:
        self.rational = None if rational is None else Fraction(rational)
        if self.rational is not None:
            if not (0 < self.rational < 1):
                raise ValueError("rational approximation must lie in (0, 1)")
            terms = _cf_terms(self.rational)
            depth = max(len(terms) - 2, 0) if trust_depth is None else trust_depth
            if depth > max(len(terms) - 2, 0):
                raise ValueError("trust depth exceeds the reliable expansion length")
            self.prefix: tuple[int, ...] = tuple(terms[:depth])
            self.period: tuple[int, ...] | None = None
            self.trust_depth: int | None = depth
        else:
            if not period:
                raise ValueError("an irrational alpha needs a nonempty period")
            self.prefix = tuple(int(a) for a in prefix)
            self.period = tuple(int(a) for a in period)
            self.trust_depth = None
        for a in self.prefix + (self.period or ()):
            if a < 1:
                raise ValueError("partial quotients must be positive")
        self._lock = threading.Lock()
        # _p[k] = p_{k-1}, _q[k] = q_{k-1}
        self._p = [1, 0]
        self._q = [0, 1]
        self._float: float | None = None

    @classmethod
    def golden(cls) -> "PartialQuotients":
        return cls((), (1,))

    @classmethod
    def periodic(cls, period: Sequence[int], prefix: Sequence[int] = ()) -> "PartialQuotients":
        return cls(prefix, period)

    @classmethod
    def from_rational(cls, value: Fraction | str, trust_depth: int | None = None) -> "PartialQuotients":
        return cls(rational=Fraction(value), trust_depth=trust_depth)

    def key(self) -> tuple:
        return (self.prefix, self.period, self.rational)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartialQuotients) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        if self.rational is not None:
            return f"PartialQuotients(rational={self.rational}, trust_depth={self.trust_depth})"
        return f"PartialQuotients(prefix={list(self.prefix)}, period={list(self.period or ())})"

    def __getitem__(self, n: int) -> int:
        """Partial quotient a_n, 1-based."""
        if n < 1:
            raise IndexError("partial quotients are indexed from 1")
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        if self.period is None:
            raise DepthExceeded(f"a_{n} is beyond the trust depth {self.trust_depth}")
        return self.period[(n - 1 - len(self.prefix)) % len(self.period)]

    def terms(self, n: int) -> list[int]:
        return [self[k] for k in range(1, n + 1)]

    def max_quotient(self, n: int) -> int:
        return max(self.terms(n)) if n > 0 else 0

    def _extend(self, n: int) -> None:
        if len(self._q) - 2 >= n:
            return
        with self._lock:
            p, q = list(self._p), list(self._q)
            while len(q) - 2 < n:
                k = len(q) - 1
                a = self[k]
                p.append(a * p[-1] + p[-2])
                q.append(a * q[-1] + q[-2])
            self._p, self._q = p, q

    def convergent(self, n: int) -> tuple[int, int]:
        if n < -1:
            raise IndexError("convergents start at n = -1")
        self._extend(n)
        return self._p[n + 1], self._q[n + 1]

    def q(self, n: int) -> int:
        return self.convergent(n)[1]

    def alpha_n(self, n: int) -> "ZAlphaElement":
        p, q = self.convergent(n)
        s = -1 if n % 2 else 1
        return ZAlphaElement(-s * p, s * q)

    def as_float(self) -> float:
        if self._float is None and self.rational is not None:
            self._float = float(self.rational)
        if self._float is None:
            iv = enclose(ZAlphaElement(0, 1), self, Fraction(1, 1 << 60))
            self._float = float((iv.lo + iv.hi) / 2)
        return self._float


def _cf_terms(x: Fraction) -> list[int]:
    terms = []
    num, den = x.numerator, x.denominator
    num, den = den, num  # skip the integer part 0
    while den:
        a, r = divmod(num, den)
        terms.append(a)
        num, den = den, r
    return terms


def convergents(pq: PartialQuotients, n: int) -> tuple[int, int]:
    """Return ``(p_n, q_n)``."""
    return pq.convergent(n)


def alpha_n(pq: PartialQuotients, n: int) -> "ZAlphaElement":
    """Return ``(-1)^n (q_n alpha - p_n)``, the positive number alpha_n."""
    return pq.alpha_n(n)


@dataclass(frozen=True)
class ZAlphaElement:
    """The real number ``u + v*alpha``.

    Coefficients are integers, or exact rationals where midpoints are
    needed; the value is still decided exactly by :func:`sign`.
    """

    u: Scalar = 0
    v: Scalar = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", _norm(self.u))
        object.__setattr__(self, "v", _norm(self.v))

    def __add__(self, other: "ZAlphaElement | int") -> "ZAlphaElement":
        if isinstance(other, ZAlphaElement):
            return ZAlphaElement(self.u + other.u, self.v + other.v)
        if isinstance(other, (int, Fraction)):
            return ZAlphaElement(self.u + other, self.v)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other: "ZAlphaElement | int") -> "ZAlphaElement":
        if isinstance(other, ZAlphaElement):
            return ZAlphaElement(self.u - other.u, self.v - other.v)
        if isinstance(other, (int, Fraction)):
            return ZAlphaElement(self.u - other, self.v)
        return NotImplemented

    def __rsub__(self, other: int | Fraction) -> "ZAlphaElement":
        return ZAlphaElement(other - self.u, -self.v)

    def __neg__(self) -> "ZAlphaElement":
        return ZAlphaElement(-self.u, -self.v)

    def __mul__(self, k: Scalar) -> "ZAlphaElement":
        if isinstance(k, (int, Fraction)):
            return ZAlphaElement(self.u * k, self.v * k)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, k: Scalar) -> "ZAlphaElement":
        return ZAlphaElement(Fraction(self.u) / k, Fraction(self.v) / k)

    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def approx(self, pq: PartialQuotients) -> float:
        if abs(self.u) < (1 << 40) and abs(self.v) < (1 << 40):
            return float(self.u) + float(self.v) * pq.as_float()
        iv = enclose(self, pq, Fraction(1, 1 << 60))
        return float((iv.lo + iv.hi) / 2)

    def __repr__(self) -> str:
        return f"ZAlpha({self.u}, {self.v})"


ZERO = ZAlphaElement(0, 0)
ONE = ZAlphaElement(1, 0)
ALPHA = ZAlphaElement(0, 1)


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, x: Fraction | int) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "RationalInterval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi


def _integer_coefficients(x: ZAlphaElement) -> tuple[int, int]:
    u, v = x.u, x.v
    if isinstance(u, int) and isinstance(v, int):
        return u, v
    fu, fv = Fraction(u), Fraction(v)
    m = math.lcm(fu.denominator, fv.denominator)
    return int(fu * m), int(fv * m)


def _bracket(pq: PartialQuotients, n: int) -> tuple[int, int, int, int]:
    """Convergents n and n+1 of alpha; alpha lies strictly between them."""
    if pq.trust_depth is not None and n + 1 > pq.trust_depth:
        raise DepthExceeded(
            f"enclosure needs a_{n + 1} but only {pq.trust_depth} quotients are trusted"
        )
    p0, q0 = pq.convergent(n)
    p1, q1 = pq.convergent(n + 1)
    return p0, q0, p1, q1


def _max_depth(pq: PartialQuotients) -> int:
    if pq.trust_depth is not None:
        return pq.trust_depth - 1
    return _SIGN_DEPTH_CAP


def sign(x: ZAlphaElement, pq: PartialQuotients) -> int:
    """Exact sign of ``u + v*alpha``."""
    u, v = _integer_coefficients(x)
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return 1 if v > 0 else -1
    if pq.rational is None and abs(u) < (1 << 52) and abs(v) < (1 << 52):
        f = u + v * pq.as_float()
        if abs(f) > 8e-15 * (abs(u) + abs(v)):
            return 1 if f > 0 else -1
    limit = _max_depth(pq)
    n = 1
    while True:
        n = min(n, limit)
        if n < 0:
            raise DepthExceeded("no trusted convergents available")
        p0, q0, p1, q1 = _bracket(pq, n)
        a = u * q0 + v * p0
        b = u * q1 + v * p1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        if n >= limit:
            raise DepthExceeded(f"sign of {x} not settled within depth {limit}")
        n *= 2


def compare(x: ZAlphaElement, y: ZAlphaElement, pq: PartialQuotients) -> int:
    return sign(x - y, pq)


def enclose(x: ZAlphaElement, pq: PartialQuotients, eps: Fraction | int | float) -> RationalInterval:
    """Rational interval of width at most ``eps`` containing ``u + v*alpha``."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    u, v = Fraction(x.u), Fraction(x.v)
    if v == 0:
        return RationalInterval(u, u)
    limit = _max_depth(pq)
    n = 1
    while True:
        n = min(n, limit)
        p0, q0, p1, q1 = _bracket(pq, n)
        if abs(v) <= eps * q0 * q1:
            a = u + v * Fraction(p0, q0)
            b = u + v * Fraction(p1, q1)
            return RationalInterval(min(a, b), max(a, b))
        if n >= limit:
            raise DepthExceeded("requested precision needs untrusted quotients")
        n += max(1, n // 2)


def floor(x: ZAlphaElement, pq: PartialQuotients) -> int:
    """Exact integer part of ``u + v*alpha``."""
    if x.v == 0:
        return math.floor(Fraction(x.u))
    eps = Fraction(1, 1 << 8)
    while True:
        iv = enclose(x, pq, eps)
        lo, hi = math.floor(iv.lo), math.floor(iv.hi)
        if lo == hi:
            return lo
        # hi is an integer candidate; decide the side exactly
        return hi if sign(x - hi, pq) >= 0 else lo


def frac(x: ZAlphaElement, pq: PartialQuotients) -> ZAlphaElement:
    """``x mod 1`` as an exact element in [0, 1)."""
    return x - floor(x, pq)


def to_fixed(x: ZAlphaElement, pq: PartialQuotients) -> int:
    """``floor(frac(x) * 2**64)``, possibly one unit low near a dyadic."""
    f = frac(x, pq)
    if f.v == 0:
        return math.floor(Fraction(f.u) * FIXED_ONE) & FIXED_MASK
    iv = enclose(f, pq, Fraction(1, 1 << (FIXED_BITS + 8)))
    return math.floor(max(iv.lo, Fraction(0)) * FIXED_ONE) & FIXED_MASK


def fixed_of_fraction(x: Fraction) -> int:
    return math.floor((x % 1) * FIXED_ONE) & FIXED_MASK


def sum_elements(items: Iterable[ZAlphaElement]) -> ZAlphaElement:
    u: Scalar = 0
    v: Scalar = 0
    for it in items:
        u += it.u
        v += it.v
    return ZAlphaElement(u, v)


def as_element(value: "ZAlphaElement | Fraction | int") -> ZAlphaElement:
    if isinstance(value, ZAlphaElement):
        return value
    if isinstance(value, (int, Fraction)):
        return ZAlphaElement(value, 0)
    raise TypeError(f"cannot interpret {value!r} as an element of Z + Z*alpha")
