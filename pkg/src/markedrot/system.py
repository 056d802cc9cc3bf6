"""The skew product T(x, s) = (x + alpha, sigma(x) s) over the rotation.

The circle is cut at marked points beta_1 < ... < beta_r and the
permutation sigma_j acts on the sheets while x is in [beta_j, beta_{j+1}).
Permutations compose right to left: ``(p * q)(s) = p(q(s))``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import Unsupported
from .exactnum import ALPHA, PartialQuotients, ZAlphaElement, as_element, frac
from .orbit import Point, cuts_fixed, exact_label, orbit_labels
from .ostrowski import DigitRule, MarkedPoint

MAX_TABLE_DEGREE = 8


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..d} stored by its images."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"{list(imgs)} is not a permutation of 1..{len(imgs)}")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def identity(cls, d: int) -> "Permutation":
        return cls(tuple(range(1, d + 1)))

    @classmethod
    def exchange(cls) -> "Permutation":
        return cls((2, 1))

    @classmethod
    def transposition(cls, d: int, i: int, j: int) -> "Permutation":
        imgs = list(range(1, d + 1))
        imgs[i - 1], imgs[j - 1] = j, i
        return cls(tuple(imgs))

    @classmethod
    def cycle(cls, d: int, *elems: int) -> "Permutation":
        imgs = list(range(1, d + 1))
        for a, b in zip(elems, elems[1:] + elems[:1]):
            imgs[a - 1] = b
        return cls(tuple(imgs))

    @property
    def d(self) -> int:
        return len(self.images)

    def __call__(self, s: int) -> int:
        return self.images[s - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(self.images[other.images[s] - 1] for s in range(other.d)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.d
        for s, t in enumerate(self.images, start=1):
            inv[t - 1] = s
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, self.d + 1))

    def sign(self) -> int:
        seen = [False] * self.d
        parity = 0
        for s in range(self.d):
            if seen[s]:
                continue
            length = 0
            t = s
            while not seen[t]:
                seen[t] = True
                t = self.images[t] - 1
                length += 1
            parity += length - 1
        return -1 if parity % 2 else 1

    def order(self) -> int:
        from math import lcm

        seen = [False] * self.d
        out = 1
        for s in range(self.d):
            length = 0
            t = s
            while not seen[t]:
                seen[t] = True
                t = self.images[t] - 1
                length += 1
            if length:
                out = lcm(out, length)
        return out

    def to_dsl(self) -> str:
        return "[" + ",".join(map(str, self.images)) + "]"

    def __repr__(self) -> str:
        return f"Permutation({list(self.images)})"


IDENTITY2 = Permutation.identity(2)
EXCHANGE = Permutation.exchange()


class _GroupTable:
    """All of S_d indexed, with left multiplication by each sigma_j tabulated."""

    def __init__(self, perms: Sequence[Permutation], d: int) -> None:
        if d > MAX_TABLE_DEGREE:
            raise Unsupported(f"sheet count {d} exceeds {MAX_TABLE_DEGREE}")
        elems = list(itertools.permutations(range(1, d + 1)))
        self.elements = [Permutation(e) for e in elems]
        self.index = {e: i for i, e in enumerate(elems)}
        self.identity = self.index[tuple(range(1, d + 1))]
        self.images = np.array([[v - 1 for v in e] for e in elems], dtype=np.int32)
        self.table = np.array(
            [[self.index[(sig * p).images] for p in self.elements] for sig in perms],
            dtype=np.int32,
        )
        self._mul: list[list[int]] | None = None

    @property
    def mul(self) -> list[list[int]]:
        """mul[i][j] is the index of elements[i] * elements[j]."""
        if self._mul is None:
            self._mul = [[self.index[(a * b).images] for b in self.elements] for a in self.elements]
        return self._mul

    def inverse(self, i: int) -> int:
        return self.index[self.elements[i].inverse().images]


@dataclass(eq=False)
class SystemSpec:
    """Rotation number, sorted marked points, permutations sigma_0..sigma_r and d."""

    pq: PartialQuotients
    points: tuple[MarkedPoint, ...]
    perms: tuple[Permutation, ...]
    construction: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.points = tuple(self.points)
        self.perms = tuple(self.perms)
        if len(self.perms) != len(self.points) + 1:
            raise ValueError("need exactly r + 1 permutations for r marked points")
        d = self.perms[0].d
        if any(p.d != d for p in self.perms):
            raise ValueError("permutations act on different sheet counts")
        for j in range(len(self.perms) - 1):
            if self.perms[j] == self.perms[j + 1]:
                raise ValueError(f"sigma_{j} equals sigma_{j + 1}")
        if sum(p.is_one_minus_alpha for p in self.points) > 1:
            raise ValueError("at most one marked point may be 1 - alpha")
        ids = [p.id for p in self.points]
        if len(set(ids)) != len(ids):
            raise ValueError("marked point ids must be distinct")
        for a, b in zip(self.points, self.points[1:]):
            if a.compare_point(b) >= 0:
                raise ValueError(f"marked points {a.id} and {b.id} are not in increasing order")
        self._table: _GroupTable | None = None
        self._cut_fp: np.ndarray | None = None

    @property
    def d(self) -> int:
        return self.perms[0].d

    @property
    def r(self) -> int:
        return len(self.points)

    @property
    def t(self) -> int | None:
        """1-based index of the point 1 - alpha, if it is marked."""
        for i, p in enumerate(self.points, start=1):
            if p.is_one_minus_alpha:
                return i
        return None

    def digit_points(self) -> list[tuple[int, MarkedPoint]]:
        """(1-based index, point) for the points other than 1 - alpha."""
        return [(i, p) for i, p in enumerate(self.points, start=1) if not p.is_one_minus_alpha]

    def group(self) -> _GroupTable:
        if self._table is None:
            self._table = _GroupTable(self.perms, self.d)
        return self._table

    def cut_fixed(self) -> np.ndarray:
        if self._cut_fp is None:
            self._cut_fp = cuts_fixed(self.points, self.pq)
        return self._cut_fp

    def point(self, id: str) -> MarkedPoint:
        for p in self.points:
            if p.id == id:
                return p
        raise KeyError(id)


def make_points(pq: PartialQuotients, items: Iterable[tuple[str, DigitRule | None]],
                rep_depth: int | None = None) -> list[MarkedPoint]:
    """Marked points sharing a registry so that mirror rules resolve.

    A rule of ``None`` stands for the point 1 - alpha.
    """
    registry: dict[str, MarkedPoint] = {}

    def lookup(name: str, n: int) -> int:
        if name not in registry:
            raise KeyError(f"mirror refers to unknown point {name!r}")
        return registry[name].rule.digit(n, pq, lookup)  # type: ignore[union-attr]

    out = []
    for id, rule in items:
        if rule is None:
            pt = MarkedPoint(id, None, pq, one_minus_alpha=True)
        else:
            pt = MarkedPoint(id, rule, pq, rep_depth=rep_depth, lookup=lookup)
        registry[id] = pt
        out.append(pt)
    return out


def sort_points(points: Sequence[MarkedPoint]) -> list[MarkedPoint]:
    import functools

    return sorted(points, key=functools.cmp_to_key(lambda a, b: a.compare_point(b)))


def make_spec(pq: PartialQuotients, items: Sequence[tuple[str, DigitRule | None]],
              perms: Sequence[Permutation], construction: str | None = None,
              options: dict | None = None) -> SystemSpec:
    """Build a spec from (id, rule) pairs given in increasing order of the points."""
    pts = make_points(pq, items)
    return SystemSpec(pq, tuple(pts), tuple(perms), construction, dict(options or {}))


def marked_cuts(spec: SystemSpec) -> list[MarkedPoint]:
    return list(spec.points)


@dataclass(frozen=True)
class LiftedPoint:
    base: ZAlphaElement
    sheet: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", as_element(self.base))


def sigma_of(spec: SystemSpec, x: Point | MarkedPoint) -> int:
    """Index j with beta_j <= x < beta_{j+1}."""
    if isinstance(x, MarkedPoint):
        j = 0
        for p in spec.points:
            if p.compare_point(x) <= 0:
                j += 1
            else:
                break
        return j
    pos = frac(as_element(x), spec.pq)
    return exact_label(pos, spec.points, spec.pq)


def labels(spec: SystemSpec, x: Point, n: int) -> np.ndarray:
    """sigma indices along the orbit x, Rx, ..., R^{n-1}x."""
    return orbit_labels(x, spec.pq, spec.points, n, cut_fp=spec.cut_fixed())


def step(spec: SystemSpec, p: LiftedPoint) -> LiftedPoint:
    j = sigma_of(spec, p.base)
    return LiftedPoint(frac(p.base + ALPHA, spec.pq), spec.perms[j](p.sheet))


def iterate(spec: SystemSpec, p: LiftedPoint, k: int) -> LiftedPoint:
    if k == 0:
        return p
    psi = cocycle(spec, p.base, k)
    return LiftedPoint(frac(p.base + ALPHA * k, spec.pq), psi(p.sheet))


def perm_indices(spec: SystemSpec, labs: np.ndarray) -> np.ndarray:
    """Group index of psi_k for k = 0..len(labs)."""
    g = spec.group()
    return kernels.prefix_perm_index(labs, g.table, g.identity)


def cocycle_from_labels(spec: SystemSpec, labs: np.ndarray) -> Permutation:
    g = spec.group()
    return g.elements[int(perm_indices(spec, labs)[-1])]


def cocycle(spec: SystemSpec, x: Point, n: int) -> Permutation:
    """psi_n(x) = sigma(R^{n-1} x) ... sigma(x)."""
    if n == 0:
        return Permutation.identity(spec.d)
    return cocycle_from_labels(spec, labels(spec, x, n))


def sheet_path(spec: SystemSpec, labs: np.ndarray, s: int) -> np.ndarray:
    """Sheets s_0 = s, s_1, ..., s_n along an orbit with the given labels."""
    g = spec.group()
    pidx = perm_indices(spec, labs)
    return g.images[pidx, s - 1] + 1


def marked_coding(spec: SystemSpec, x: Point, N: int) -> tuple[int, ...]:
    return tuple(labels(spec, x, N).tolist())


def rotation_coding(pq: PartialQuotients, x: Point, N: int) -> tuple[int, ...]:
    """Coding by the atoms [0, 1-alpha) and [1-alpha, 1)."""
    return tuple(orbit_labels(x, pq, [ZAlphaElement(1, -1)], N).tolist())


def natural_coding(spec: SystemSpec, p: LiftedPoint, N: int) -> tuple[tuple[int, int], ...]:
    """Letters (sheet, interval index) along the orbit of a lifted point."""
    labs = labels(spec, p.base, N)
    sheets = sheet_path(spec, labs, p.sheet)
    return tuple(zip(sheets[:-1].tolist(), labs.tolist()))


def project_phi(word: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    return tuple(letter[1] for letter in word)


def minimality_check(perms: Sequence[Permutation], d: int | None = None) -> bool:
    """True when no proper subset of the sheets is invariant under every sigma."""
    d = d if d is not None else perms[0].d
    seen = {1}
    todo = [1]
    while todo:
        s = todo.pop()
        for p in perms:
            for t in (p(s), p.inverse()(s)):
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return len(seen) == d


def product_inequality(spec: SystemSpec) -> bool:
    """sigma_r sigma_{t-1} != sigma_0 sigma_t, or sigma_r != sigma_0 without t."""
    s = spec.perms
    t = spec.t
    if t is None:
        return s[-1] != s[0]
    return s[-1] * s[t - 1] != s[0] * s[t]


def veech_spec(pq: PartialQuotients, rule: DigitRule) -> SystemSpec:
    """The two-sheet example with sigma_0 = E on [0, beta) and sigma_1 = I."""
    return make_spec(pq, [("b1", rule)], [EXCHANGE, IDENTITY2])


def random_base_point(rng: np.random.Generator) -> Fraction:
    return Fraction(int.from_bytes(rng.bytes(8), "little"), 1 << 64)
