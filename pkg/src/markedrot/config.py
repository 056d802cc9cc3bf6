"""Line-oriented system configuration files.

Grammar (one statement per line, ``#`` starts a comment)::

    document   = { line } ;
    line       = alpha | point | perm | "d" "=" int
               | "construction" "=" name | "option" name "=" text ;
    alpha      = "alpha.quotients" "=" intlist      (* prefix a_1..a_m *)
               | "alpha.period" "=" intlist
               | "alpha.rational" "=" int "/" int
               | "alpha.trust_depth" "=" int ;
    point      = "point" name "=" ( rule | "one_minus_alpha" ) ;
    perm       = "perm" "=" intlist ;              (* sigma_0, sigma_1, ... in order *)
    rule       = see :func:`markedrot.ostrowski.parse_rule` ;

Points are listed in increasing order on the circle and ``perm`` lines
give sigma_0..sigma_r in order.  Example::

    alpha.period = [1]
    point b1 = tail=pattern([1,0,0])
    perm = [2,1]
    perm = [1,2]
    option depth = 200
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ConfigError, MarkedRotError, NotMinimal
from .exactnum import PartialQuotients
from .ostrowski import parse_rule
from .system import Permutation, SystemSpec, make_points, minimality_check

_LINE = re.compile(r"^\s*(?P<key>[A-Za-z_][A-Za-z_0-9.]*)(?:\s+(?P<name>[A-Za-z_][A-Za-z_0-9]*))?\s*=\s*(?P<value>.*?)\s*$")


def _int_list(text: str, line: int, fld: str) -> tuple[int, ...]:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ConfigError("expected a list like [1,2,3]", line, fld)
    body = t[1:-1].strip()
    if not body:
        return ()
    try:
        return tuple(int(x) for x in body.split(","))
    except ValueError:
        raise ConfigError("list entries must be integers", line, fld) from None


@dataclass
class ConfigDocument:
    quotients: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    rational: Fraction | None = None
    trust_depth: int | None = None
    points: list[tuple[str, str | None]] = field(default_factory=list)
    perms: list[tuple[int, ...]] = field(default_factory=list)
    d: int | None = None
    construction: str | None = None
    options: dict[str, str] = field(default_factory=dict)

    # -- conversion ---------------------------------------------------------

    def partial_quotients(self) -> PartialQuotients:
        if self.rational is not None:
            return PartialQuotients.from_rational(self.rational, self.trust_depth)
        if not self.period:
            raise ConfigError("alpha needs a period or a rational value", field="alpha")
        return PartialQuotients.periodic(self.period, self.quotients)

    def to_spec(self) -> SystemSpec:
        pq = self.partial_quotients()
        items = []
        for i, (name, text) in enumerate(self.points):
            if text is None:
                items.append((name, None))
                continue
            try:
                items.append((name, parse_rule(text)))
            except ValueError as exc:
                raise ConfigError(str(exc), field=f"point {name}") from None
        try:
            perms = [Permutation(p) for p in self.perms]
        except ValueError as exc:
            raise ConfigError(str(exc), field="perm") from None
        if self.d is not None and any(p.d != self.d for p in perms):
            raise ConfigError(f"permutations must act on d = {self.d} sheets", field="d")
        if perms and not minimality_check(perms):
            raise NotMinimal("the permutations leave a proper set of sheets invariant")
        try:
            pts = make_points(pq, items)
            return SystemSpec(pq, tuple(pts), tuple(perms), self.construction, dict(self.options))
        except MarkedRotError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc), field="points") from None

    @classmethod
    def from_spec(cls, spec: SystemSpec) -> "ConfigDocument":
        pq = spec.pq
        doc = cls()
        if pq.rational is not None:
            doc.rational = pq.rational
            doc.trust_depth = pq.trust_depth
        else:
            doc.quotients = tuple(pq.prefix)
            doc.period = tuple(pq.period or ())
        doc.points = [(p.id, None if p.rule is None else p.rule.to_dsl()) for p in spec.points]
        doc.perms = [p.images for p in spec.perms]
        doc.d = spec.d
        doc.construction = spec.construction
        doc.options = {k: str(v) for k, v in spec.options.items()}
        return doc

    # -- text ---------------------------------------------------------------

    def emit(self) -> str:
        out = []
        if self.rational is not None:
            out.append(f"alpha.rational = {self.rational.numerator}/{self.rational.denominator}")
            if self.trust_depth is not None:
                out.append(f"alpha.trust_depth = {self.trust_depth}")
        else:
            if self.quotients:
                out.append("alpha.quotients = [" + ",".join(map(str, self.quotients)) + "]")
            out.append("alpha.period = [" + ",".join(map(str, self.period)) + "]")
        if self.d is not None:
            out.append(f"d = {self.d}")
        for name, text in self.points:
            out.append(f"point {name} = {'one_minus_alpha' if text is None else text}")
        for p in self.perms:
            out.append("perm = [" + ",".join(map(str, p)) + "]")
        if self.construction:
            out.append(f"construction = {self.construction}")
        for k in sorted(self.options):
            out.append(f"option {k} = {self.options[k]}")
        return "\n".join(out) + "\n"


def parse_config(text: str) -> ConfigDocument:
    doc = ConfigDocument()
    names: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ConfigError("expected 'key = value'", lineno)
        key, name, value = m.group("key"), m.group("name"), m.group("value")
        if key == "point":
            if not name:
                raise ConfigError("point needs a name", lineno, "point")
            if name in names:
                raise ConfigError(f"duplicate point {name!r}", lineno, f"point {name}")
            names.add(name)
            if value == "one_minus_alpha":
                doc.points.append((name, None))
            else:
                try:
                    parse_rule(value)
                except ValueError as exc:
                    raise ConfigError(f"bad digit rule: {exc}", lineno, f"point {name}") from None
                doc.points.append((name, value))
        elif key == "option":
            if not name:
                raise ConfigError("option needs a name", lineno, "option")
            doc.options[name] = value
        elif name:
            raise ConfigError(f"unexpected name after {key!r}", lineno, key)
        elif key == "alpha.quotients":
            doc.quotients = _int_list(value, lineno, key)
        elif key == "alpha.period":
            doc.period = _int_list(value, lineno, key)
        elif key == "alpha.rational":
            try:
                doc.rational = Fraction(value)
            except ValueError:
                raise ConfigError("expected p/q", lineno, key) from None
        elif key == "alpha.trust_depth":
            doc.trust_depth = _int(value, lineno, key)
        elif key == "perm":
            doc.perms.append(_int_list(value, lineno, key))
        elif key == "d":
            doc.d = _int(value, lineno, key)
        elif key == "construction":
            doc.construction = value
        else:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
    return doc


def _int(value: str, line: int, fld: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError("expected an integer", line, fld) from None


def load_spec(text: str) -> SystemSpec:
    return parse_config(text).to_spec()


def emit_spec(spec: SystemSpec) -> str:
    return ConfigDocument.from_spec(spec).emit()
