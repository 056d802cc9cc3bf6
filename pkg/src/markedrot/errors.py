"""Exception types shared across the package."""

from __future__ import annotations


class MarkedRotError(Exception):
    """Base class for all package errors."""


class DepthExceeded(MarkedRotError, ArithmeticError):
    """A request needs more partial quotients than are trusted."""


class Undecided(MarkedRotError, ArithmeticError):
    """A comparison could not be settled within the depth budget."""


class AmbiguousBoundary(MarkedRotError, ValueError):
    """A point sits on a boundary that the representation cannot resolve."""


class MarkovViolation(MarkedRotError, ValueError):
    """A digit sequence breaks the rule b_n = a_n => b_{n+1} = 0."""

    def __init__(self, index: int, message: str | None = None) -> None:
        self.index = index
        super().__init__(message or f"Markov condition violated at digit {index}")


class Unsupported(MarkedRotError, ValueError):
    """The operation does not apply to this kind of point."""


class NotMinimal(MarkedRotError, ValueError):
    """The permutations do not act transitively on the sheets."""


class NotFound(MarkedRotError, LookupError):
    """A bounded search ended without a hit."""

    def __init__(self, max_k: int) -> None:
        self.max_k = max_k
        super().__init__(f"no hit for k < {max_k}")


class LengthMismatch(MarkedRotError, ValueError):
    """Two words that must have equal length do not."""


class ScheduleInfeasible(MarkedRotError, ValueError):
    """A construction schedule cannot be realised for these partial quotients."""


class BudgetExceeded(MarkedRotError, RuntimeError):
    """A computation would exceed its configured work budget."""


class ConfigError(MarkedRotError, ValueError):
    """A configuration document could not be parsed."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None) -> None:
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
