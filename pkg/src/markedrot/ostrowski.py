"""Alternating Ostrowski expansions of marked points.

A point p in [0, 1) is placed in the two Rokhlin towers of every level
n.  Its horizontal offset x_n inside its tower, its column b_{n+1} and
its level y_n follow a parity-free recursion:

* large tower, column c < a_{n+1}:  x_{n+1} = (c+1) alpha_n - x_n
* large tower, column c = a_{n+1}:  x_{n+1} = alpha_{n-1} - x_n, and the
  point moves to the small (n+1)-tower
* small tower (column 0):           x_{n+1} = alpha_n - x_n

Offsets are measured from the left side of a tower at odd levels and
from the right side at even levels; with that convention the level 0
tower is the whole circle with x_0 = 1 - p.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, Sequence

from .errors import DepthExceeded, MarkovViolation, Undecided, Unsupported
from .exactnum import (
    ONE,
    PartialQuotients,
    ZAlphaElement,
    as_element,
    enclose,
    floor,
    frac,
    sign,
    to_fixed,
)

D_MAX = 256

# ---------------------------------------------------------------------------
# digit rules


class SubRule:
    """Digit generator for positions past the explicit prefix."""

    def digit(self, n: int, pq: PartialQuotients, lookup: "Lookup") -> int:
        raise NotImplementedError

    def to_dsl(self) -> str:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SubRule) and self.to_dsl() == other.to_dsl()

    def __hash__(self) -> int:
        return hash(self.to_dsl())

    def __repr__(self) -> str:
        return f"<{self.to_dsl()}>"


Lookup = Callable[[str, int], int]


class Constant(SubRule):
    def __init__(self, c: int) -> None:
        if c < 0:
            raise ValueError("digits are nonnegative")
        self.c = c

    def digit(self, n, pq, lookup):
        return self.c

    def to_dsl(self) -> str:
        return f"const({self.c})"


class AMinusOne(SubRule):
    """b_n = a_n - 1: the digits of alpha itself."""

    def digit(self, n, pq, lookup):
        return pq[n] - 1

    def to_dsl(self) -> str:
        return "a_minus_1"


class AMaxAtParity(SubRule):
    """b_n = a_n at one parity of n and 0 at the other."""

    def __init__(self, parity: str) -> None:
        if parity not in ("odd", "even"):
            raise ValueError("parity must be 'odd' or 'even'")
        self.parity = parity

    def digit(self, n, pq, lookup):
        hit = (n % 2 == 1) if self.parity == "odd" else (n % 2 == 0)
        return pq[n] if hit else 0

    def to_dsl(self) -> str:
        return f"a_max({self.parity})"


class Periodic(SubRule):
    """b_n = pattern[(n - 1) mod len(pattern)], aligned to n = 1."""

    def __init__(self, pattern: Sequence[int]) -> None:
        if not pattern:
            raise ValueError("empty pattern")
        self.pattern = tuple(int(b) for b in pattern)

    def digit(self, n, pq, lookup):
        return self.pattern[(n - 1) % len(self.pattern)]

    def to_dsl(self) -> str:
        return "pattern([" + ",".join(map(str, self.pattern)) + "])"


class Mirror(SubRule):
    """Copy the digit of another named point."""

    def __init__(self, other: str) -> None:
        self.other = other

    def digit(self, n, pq, lookup):
        return lookup(self.other, n)

    def to_dsl(self) -> str:
        return f"mirror({self.other})"


class Schedule(SubRule):
    """Piecewise rule: ``(lo, hi, sub)`` applies for lo <= n <= hi (hi=None: open)."""

    def __init__(self, entries: Sequence[tuple[int, int | None, SubRule]]) -> None:
        self.entries = tuple((int(lo), None if hi is None else int(hi), sub) for lo, hi, sub in entries)
        if not self.entries:
            raise ValueError("empty schedule")

    def digit(self, n, pq, lookup):
        for lo, hi, sub in self.entries:
            if lo <= n and (hi is None or n <= hi):
                return sub.digit(n, pq, lookup)
        raise ValueError(f"schedule does not cover n = {n}")

    def to_dsl(self) -> str:
        parts = []
        for lo, hi, sub in self.entries:
            rng = f"{lo}..{'' if hi is None else hi}"
            parts.append(f"{rng}:{sub.to_dsl()}")
        return "schedule(" + ", ".join(parts) + ")"


class Explicit(SubRule):
    """A finite digit list starting at position ``start``, then ``then``."""

    def __init__(self, start: int, digits: Sequence[int], then: SubRule) -> None:
        self.start = start
        self.digits = tuple(digits)
        self.then = then

    def digit(self, n, pq, lookup):
        k = n - self.start
        if 0 <= k < len(self.digits):
            return self.digits[k]
        return self.then.digit(n, pq, lookup)

    def to_dsl(self) -> str:
        return f"list({self.start},[{','.join(map(str, self.digits))}],{self.then.to_dsl()})"


@dataclass(frozen=True, eq=False)
class DigitRule:
    """Explicit prefix b_1..b_m followed by a tail rule."""

    prefix: tuple[int, ...] = ()
    tail: SubRule = Constant(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(int(b) for b in self.prefix))

    def digit(self, n: int, pq: PartialQuotients, lookup: Lookup | None = None) -> int:
        if n <= len(self.prefix):
            return self.prefix[n - 1]
        return self.tail.digit(n, pq, lookup or _no_lookup)

    def digits(self, pq: PartialQuotients, N: int, lookup: Lookup | None = None) -> list[int]:
        return [self.digit(n, pq, lookup) for n in range(1, N + 1)]

    def to_dsl(self) -> str:
        parts = []
        if self.prefix:
            parts.append("prefix=[" + ",".join(map(str, self.prefix)) + "]")
        parts.append("tail=" + self.tail.to_dsl())
        return "; ".join(parts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, DigitRule) and self.to_dsl() == other.to_dsl()

    def __hash__(self) -> int:
        return hash(self.to_dsl())

    @classmethod
    def constant(cls, c: int, prefix: Sequence[int] = ()) -> "DigitRule":
        return cls(tuple(prefix), Constant(c))

    @classmethod
    def a_minus_1(cls, prefix: Sequence[int] = ()) -> "DigitRule":
        return cls(tuple(prefix), AMinusOne())

    @classmethod
    def periodic(cls, pattern: Sequence[int], prefix: Sequence[int] = ()) -> "DigitRule":
        return cls(tuple(prefix), Periodic(pattern))

    @classmethod
    def explicit(cls, digits: Sequence[int], then: SubRule | None = None) -> "DigitRule":
        return cls(tuple(digits), then or Constant(0))

    @classmethod
    def parse(cls, text: str) -> "DigitRule":
        return parse_rule(text)


def _no_lookup(name: str, n: int) -> int:
    raise ValueError(f"mirror({name}) needs the other points of a system")


_TOKEN = re.compile(r"\s*(?:(\d+)|(\.\.)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


class _RuleParser:
    def __init__(self, text: str) -> None:
        self.tokens: list[tuple[str, str]] = []
        for m in _TOKEN.finditer(text):
            num, dots, name, ch = m.groups()
            if num is not None:
                self.tokens.append(("num", num))
            elif dots is not None:
                self.tokens.append(("..", dots))
            elif name is not None:
                self.tokens.append(("name", name))
            elif ch is not None and not ch.isspace():
                self.tokens.append((ch, ch))
        self.i = 0

    def peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, kind: str | None = None, value: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of rule")
        if (kind is not None and tok[0] != kind) or (value is not None and tok[1] != value):
            raise ValueError(f"unexpected token {tok[1]!r} in rule")
        self.i += 1
        return tok[1]

    def int_list(self) -> list[int]:
        self.take("[")
        out: list[int] = []
        if self.peek() and self.peek()[0] == "]":
            self.take("]")
            return out
        while True:
            out.append(int(self.take("num")))
            if self.peek() and self.peek()[0] == ",":
                self.take(",")
                continue
            self.take("]")
            return out

    def sub(self) -> SubRule:
        name = self.take("name")
        if name == "a_minus_1":
            return AMinusOne()
        if name == "const":
            self.take("(")
            c = int(self.take("num"))
            self.take(")")
            return Constant(c)
        if name == "a_max":
            self.take("(")
            par = self.take("name")
            self.take(")")
            return AMaxAtParity(par)
        if name == "pattern":
            self.take("(")
            pat = self.int_list()
            self.take(")")
            return Periodic(pat)
        if name == "mirror":
            self.take("(")
            other = self.take("name")
            self.take(")")
            return Mirror(other)
        if name == "list":
            self.take("(")
            start = int(self.take("num"))
            self.take(",")
            digits = self.int_list()
            self.take(",")
            then = self.sub()
            self.take(")")
            return Explicit(start, digits, then)
        if name == "schedule":
            self.take("(")
            entries = []
            while True:
                lo = int(self.take("num"))
                self.take("..")
                hi = None
                if self.peek() and self.peek()[0] == "num":
                    hi = int(self.take("num"))
                self.take(":")
                entries.append((lo, hi, self.sub()))
                if self.peek() and self.peek()[0] == ",":
                    self.take(",")
                    continue
                self.take(")")
                return Schedule(entries)
        raise ValueError(f"unknown digit rule {name!r}")

    def rule(self) -> DigitRule:
        prefix: list[int] = []
        tail: SubRule = Constant(0)
        while self.peek() is not None:
            key = self.take("name")
            self.take("=")
            if key == "prefix":
                prefix = self.int_list()
            elif key == "tail":
                tail = self.sub()
            else:
                raise ValueError(f"unknown rule field {key!r}")
            if self.peek() is not None:
                self.take(";")
        return DigitRule(tuple(prefix), tail)


def parse_rule(text: str) -> DigitRule:
    """Parse the rule DSL, e.g. ``prefix=[1,0]; tail=pattern([1,0,0])``."""
    return _RuleParser(text).rule()


# ---------------------------------------------------------------------------
# validation


def markov_validate(digits: Sequence[int], pq: PartialQuotients) -> int | None:
    """Index (1-based) of the first invalid digit, or None when valid."""
    prev_max = False
    for n, b in enumerate(digits, start=1):
        a = pq[n]
        if b < 0 or b > a:
            return n
        if prev_max and b != 0:
            return n
        prev_max = b == a
    return None


# ---------------------------------------------------------------------------
# geometry of one level


def tower_width(pq: PartialQuotients, n: int, small: bool) -> ZAlphaElement:
    return pq.alpha_n(n) if small else pq.alpha_n(n - 1)


def column_of(x: ZAlphaElement, pq: PartialQuotients, n: int) -> int:
    """Column of a large-tower offset x at level n (left-closed on the circle)."""
    a = pq[n + 1]
    an = pq.alpha_n(n)
    if n % 2:
        c = 0
        while c < a and sign(x - an * (c + 1), pq) >= 0:
            c += 1
        return c
    c = 0
    while c < a and sign(x - an * (c + 1), pq) > 0:
        c += 1
    return c


def step_offset(x: ZAlphaElement, small: bool, c: int, pq: PartialQuotients, n: int) -> tuple[ZAlphaElement, bool]:
    """Offset and tower at level n+1 given tower and column at level n."""
    a = pq[n + 1]
    if small or c < a:
        return pq.alpha_n(n) * (c + 1) - x, False
    return pq.alpha_n(n - 1) - x, True


def step_level(y: int, small: bool, c: int, pq: PartialQuotients, n: int) -> int:
    a = pq[n + 1]
    if small or c < a:
        return y + (a - 1 - c) * pq.q(n)
    return pq.q(n + 1) + y


def step_constant(b_next: int, pq: PartialQuotients, n: int) -> ZAlphaElement:
    """K_n with x_n + x_{n+1} = K_n."""
    if b_next < pq[n + 1]:
        return pq.alpha_n(n) * (b_next + 1)
    return pq.alpha_n(n - 1)


@dataclass(frozen=True)
class LevelRecord:
    n: int
    small: bool
    column: int
    x: ZAlphaElement
    y: int


def trace(value: ZAlphaElement | Fraction | int, pq: PartialQuotients, N: int) -> list[LevelRecord]:
    """Placement of ``value`` at levels 0..N-1 by forward descent."""
    p = frac(as_element(value), pq)
    x = ONE - p
    small = False
    y = 0
    out = []
    for n in range(N):
        c = 0 if small else column_of(x, pq, n)
        out.append(LevelRecord(n, small, c, x, y))
        y = step_level(y, small, c, pq, n)
        x, small = step_offset(x, small, c, pq, n)
    return out


def expand(value: ZAlphaElement | Fraction | int, pq: PartialQuotients, N: int) -> list[int]:
    """Digits b_1..b_N of a point of [0, 1)."""
    return [rec.column for rec in trace(value, pq, N)]


# ---------------------------------------------------------------------------
# synthesis


def cylinder_bounds(digits: Sequence[int], pq: PartialQuotients) -> tuple[ZAlphaElement, ZAlphaElement]:
    """Exact [lo, hi) of the points whose first D digits are ``digits``."""
    D = len(digits)
    if D == 0:
        return ZAlphaElement(0, 0), ONE
    S = ZAlphaElement(0, 0)
    for n in range(D):
        K = step_constant(digits[n], pq, n)
        S = S + K if n % 2 == 0 else S - K
    w = tower_width(pq, D, digits[D - 1] == pq[D])
    base = ONE - S
    if D % 2 == 0:
        return base - w, base
    return base, base + w


def offsets_from_digits(digits: Sequence[int], pq: PartialQuotients) -> list[ZAlphaElement]:
    """Offsets x_0..x_D of the midpoint of the depth-D cylinder."""
    D = len(digits)
    small = D > 0 and digits[D - 1] == pq[D]
    xs = [ZAlphaElement(0, 0)] * (D + 1)
    xs[D] = tower_width(pq, D, small) / 2
    for n in range(D - 1, -1, -1):
        xs[n] = step_constant(digits[n], pq, n) - xs[n + 1]
    return xs


def corrected_digits(digits: Sequence[int], pq: PartialQuotients) -> list[int]:
    """The digits used in the alternating partial sums.

    bbar_n is 0 right after a maximal digit, a_n at a maximal digit and
    b_n + 1 otherwise.
    """
    out = []
    for n, b in enumerate(digits, start=1):
        if n > 1 and digits[n - 2] == pq[n - 1]:
            out.append(0)
        elif b == pq[n]:
            out.append(b)
        else:
            out.append(b + 1)
    return out


def partial_value(digits: Sequence[int], pq: PartialQuotients) -> ZAlphaElement:
    """1 - sum_{n<N} (-1)^n bbar_{n+1} alpha_n."""
    bb = corrected_digits(digits, pq)
    S = ZAlphaElement(0, 0)
    for n, b in enumerate(bb):
        term = pq.alpha_n(n) * b
        S = S + term if n % 2 == 0 else S - term
    return ONE - S


@dataclass(frozen=True)
class AlphaInterval:
    """Half-open interval with exact Z + Z*alpha endpoints."""

    lo: ZAlphaElement
    hi: ZAlphaElement

    def width(self) -> ZAlphaElement:
        return self.hi - self.lo

    def contains(self, x: ZAlphaElement, pq: PartialQuotients) -> bool:
        return sign(x - self.lo, pq) >= 0 and sign(self.hi - x, pq) > 0

    def rational(self, pq: PartialQuotients, eps: Fraction = Fraction(1, 1 << 80)):
        lo = enclose(self.lo, pq, eps).lo
        hi = enclose(self.hi, pq, eps).hi
        from .exactnum import RationalInterval

        return RationalInterval(lo, hi)


@dataclass(frozen=True)
class Synthesis:
    digits: tuple[int, ...]
    cylinder: AlphaInterval
    partial_value: ZAlphaElement
    midpoint: ZAlphaElement


def synthesize(rule: DigitRule | Sequence[int], pq: PartialQuotients, N: int, lookup: Lookup | None = None) -> Synthesis:
    """Cylinder, partial sum and midpoint of the depth-N truncation."""
    digits = list(rule) if not isinstance(rule, DigitRule) else rule.digits(pq, N, lookup)
    digits = digits[:N]
    bad = markov_validate(digits, pq)
    if bad is not None:
        raise MarkovViolation(bad)
    lo, hi = cylinder_bounds(digits, pq)
    mid = ONE - offsets_from_digits(digits, pq)[0]
    return Synthesis(tuple(digits), AlphaInterval(lo, hi), partial_value(digits, pq), mid)


# ---------------------------------------------------------------------------
# marked points


def representative_depth(pq: PartialQuotients, minimum: int = 64, bits: int = 90) -> int:
    """Smallest depth >= minimum whose tower widths are below 2**-bits.

    In rational-approximation mode the depth is capped at the trust depth.
    """
    D = minimum
    tiny = Fraction(1, 1 << bits)
    cap = pq.trust_depth
    while True:
        if cap is not None and D >= cap:
            return cap
        a = pq.alpha_n(D - 1)
        if sign(a - tiny, pq) < 0:
            return D
        D += 8


class MarkedPoint:
    """A marked point given by a digit rule, or the special point 1 - alpha."""

    def __init__(
        self,
        id: str,
        rule: DigitRule | None,
        pq: PartialQuotients,
        *,
        one_minus_alpha: bool = False,
        rep_depth: int | None = None,
        lookup: Lookup | None = None,
    ) -> None:
        if one_minus_alpha == (rule is not None):
            raise ValueError("give either a digit rule or one_minus_alpha=True")
        self.id = id
        self.rule = rule
        self.pq = pq
        self.lookup = lookup
        self._lock = threading.Lock()
        self._digits: tuple[int, ...] = ()
        self._rep: ZAlphaElement | None = None
        self._offsets: list[ZAlphaElement] | None = None
        self._fixed: int | None = None
        self.rep_depth = rep_depth if rep_depth is not None else (0 if one_minus_alpha else representative_depth(pq))

    @classmethod
    def one_minus_alpha_point(cls, pq: PartialQuotients, id: str = "t") -> "MarkedPoint":
        return cls(id, None, pq, one_minus_alpha=True)

    @property
    def kind(self) -> str:
        return "one_minus_alpha" if self.rule is None else "digit_stream"

    @property
    def is_one_minus_alpha(self) -> bool:
        return self.rule is None

    def __repr__(self) -> str:
        if self.rule is None:
            return f"MarkedPoint({self.id!r}, one_minus_alpha)"
        return f"MarkedPoint({self.id!r}, {self.rule.to_dsl()!r})"

    def digits(self, N: int) -> tuple[int, ...]:
        if self.rule is None:
            raise Unsupported("1 - alpha carries no digits")
        if len(self._digits) < N:
            new = tuple(self.rule.digits(self.pq, N, self.lookup))
            bad = markov_validate(new, self.pq)
            if bad is not None:
                raise MarkovViolation(bad)
            with self._lock:
                if len(self._digits) < N:
                    self._digits = new
        return self._digits[:N]

    def digit(self, n: int) -> int:
        return self.digits(n)[n - 1]

    def cylinder(self, D: int) -> AlphaInterval:
        if self.rule is None:
            v = ZAlphaElement(1, -1)
            return AlphaInterval(v, v)
        return AlphaInterval(*cylinder_bounds(self.digits(D), self.pq))

    def _ensure_rep(self) -> None:
        if self._offsets is None:
            offs = offsets_from_digits(self.digits(self.rep_depth), self.pq)
            with self._lock:
                self._offsets = offs
                self._rep = ONE - offs[0]

    def representative(self) -> ZAlphaElement:
        """An exact point of the depth-``rep_depth`` cylinder (its midpoint)."""
        if self.rule is None:
            return ZAlphaElement(1, -1)
        self._ensure_rep()
        return self._rep  # type: ignore[return-value]

    def offsets(self) -> list[ZAlphaElement]:
        """x_0..x_D of the representative."""
        if self.rule is None:
            raise Unsupported("1 - alpha sits on a tower side")
        self._ensure_rep()
        return self._offsets  # type: ignore[return-value]

    def fixed(self) -> int:
        """Value scaled to 2**64, within two units."""
        if self._fixed is None:
            self._fixed = to_fixed(self.representative(), self.pq)
        return self._fixed

    def enclosure(self, eps: Fraction):
        D = 8
        while True:
            iv = self.cylinder(D)
            r = iv.rational(self.pq, eps / 4)
            if r.width <= eps or D >= D_MAX:
                return r
            D *= 2

    def compare(self, x: ZAlphaElement) -> int:
        """sign(x - beta), deciding ties within D_MAX digits."""
        if self.rule is None:
            return sign(x - ZAlphaElement(1, -1), self.pq)
        D = 8
        while True:
            iv = self.cylinder(min(D, D_MAX))
            if sign(x - iv.lo, self.pq) < 0:
                return -1
            if sign(x - iv.hi, self.pq) >= 0:
                return 1
            if D >= D_MAX:
                raise Undecided(f"point {x} not separated from {self.id} within {D_MAX} digits")
            D *= 2

    def compare_point(self, other: "MarkedPoint") -> int:
        """sign(self - other)."""
        if self is other:
            return 0
        if self.rule is None:
            return other.compare(ZAlphaElement(1, -1))
        if other.rule is None:
            return -self.compare(ZAlphaElement(1, -1))
        D = 8
        while True:
            d = min(D, D_MAX)
            a = self.cylinder(d)
            b = other.cylinder(d)
            if sign(a.hi - b.lo, self.pq) <= 0:
                return -1
            if sign(b.hi - a.lo, self.pq) <= 0:
                return 1
            if D >= D_MAX:
                raise Undecided(f"points {self.id} and {other.id} agree to {D_MAX} digits")
            D *= 2


# ---------------------------------------------------------------------------
# per-level statistics


@dataclass(frozen=True)
class PositionStats:
    n: int
    column: int
    tower: str
    x: ZAlphaElement
    x_prime: ZAlphaElement
    y: int
    y_prime: int
    y_second: int | None


def levels_from_digits(digits: Sequence[int], pq: PartialQuotients) -> list[int]:
    """y_0..y_len(digits)."""
    ys = [0]
    y = 0
    for n, b in enumerate(digits):
        small = n > 0 and digits[n - 1] == pq[n]
        y = step_level(y, small, b, pq, n)
        ys.append(y)
    return ys


def position_stats(beta: MarkedPoint, pq: PartialQuotients, n: int) -> PositionStats:
    """Tower, column, offsets and levels of a marked point at level n.

    Offsets are those of the point's depth-D representative, which agree
    with the limit point's combinatorics at every level below D.
    """
    if beta.is_one_minus_alpha:
        raise Unsupported("1 - alpha sits on a tower side and has no offsets")
    if n + 2 > beta.rep_depth:
        raise DepthExceeded(f"level {n} is beyond the representative depth {beta.rep_depth}")
    digits = beta.digits(n + 1)
    small = n > 0 and digits[n - 1] == pq[n]
    x = beta.offsets()[n]
    y = levels_from_digits(digits[:n], pq)[n]
    w = tower_width(pq, n, small)
    qn, qm = pq.q(n), pq.q(n - 1)
    if small:
        return PositionStats(n, digits[n], "small", x, w - x, y, qn + qm - y, y - qn)
    return PositionStats(n, digits[n], "large", x, w - x, y, qn - y, None)


def _abs(x: ZAlphaElement, pq: PartialQuotients) -> ZAlphaElement:
    return -x if sign(x, pq) < 0 else x


@dataclass(frozen=True)
class PairStats:
    x_gap: ZAlphaElement
    y_gap: int
    x_alpha: ZAlphaElement


def pair_stats(bi: MarkedPoint, bj: MarkedPoint, pq: PartialQuotients, n: int) -> PairStats:
    """Horizontal and vertical gaps between two points, and of the first from alpha.

    The horizontal distance from alpha is taken as |x'_n - alpha_n|, which
    is the distance from alpha's vertical at level n.
    """
    si = position_stats(bi, pq, n)
    sj = position_stats(bj, pq, n)
    return PairStats(
        _abs(si.x - sj.x, pq),
        abs(si.y - sj.y),
        _abs(si.x_prime - pq.alpha_n(n), pq),
    )


@dataclass(frozen=True)
class MembershipHint:
    likely_in_z_alpha: bool
    pattern: str | None
    depth: int


def z_alpha_membership_hint(digits: Sequence[int], pq: PartialQuotients) -> MembershipHint:
    """Finite-depth hint whether a digit stream looks like a point of Z + Z*alpha."""
    N = len(digits)
    if N < 4:
        raise ValueError("need at least four digits")
    start = N - N // 2  # 0-based start of the observed suffix
    idx = range(start + 1, N + 1)
    if all(digits[n - 1] == pq[n] - 1 for n in idx):
        return MembershipHint(True, "a_minus_1", N)
    if all(digits[n - 1] == pq[n] for n in idx if n % 2 == 0):
        return MembershipHint(True, "even_max", N)
    if all(digits[n - 1] == pq[n] for n in idx if n % 2 == 1):
        return MembershipHint(True, "odd_max", N)
    return MembershipHint(False, None, N)


def iter_digits(rule: DigitRule, pq: PartialQuotients, lookup: Lookup | None = None) -> Iterator[int]:
    n = 1
    while True:
        yield rule.digit(n, pq, lookup)
        n += 1
