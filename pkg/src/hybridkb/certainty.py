"""Certainty intervals and ground literals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .errors import MalformedCertainty

NEGATION_PREFIX = "~"


@dataclass(frozen=True, order=True)
class Certainty:
    """Closed interval ``[lower, upper]`` inside ``[0, 1]``.

    The lower bound is the degree of confirmation; the upper bound is the
    degree to which the evidence failed to refute. Their difference is the
    ignorance attached to the value.
    """

    lower: float
    upper: float

    def __post_init__(self):
        lo, hi = float(self.lower), float(self.upper)
        if not (0.0 <= lo <= hi <= 1.0):
            raise MalformedCertainty(f"invalid certainty interval [{self.lower}, {self.upper}]")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def point(cls, x: float) -> "Certainty":
        return cls(x, x)

    @classmethod
    def coerce(cls, value) -> "Certainty":
        """Accept a Certainty, a scalar degree, or a ``(lower, upper)`` pair."""
        if isinstance(value, Certainty):
            return value
        if isinstance(value, (int, float)):
            return cls.point(value)
        try:
            lo, hi = value
        except (TypeError, ValueError):
            raise MalformedCertainty(f"cannot interpret {value!r} as a certainty") from None
        return cls(lo, hi)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def is_certain(self) -> bool:
        return self.lower == 1.0 and self.upper == 1.0

    @property
    def is_vacuous(self) -> bool:
        return self.lower == 0.0 and self.upper == 1.0

    def complement(self) -> "Certainty":
        return Certainty(1.0 - self.upper, 1.0 - self.lower)

    def __str__(self):
        return f"[{_fmt(self.lower)}, {_fmt(self.upper)}]"


def _fmt(x: float) -> str:
    return f"{x:g}"


CERTAIN = Certainty(1.0, 1.0)
UNKNOWN = Certainty(0.0, 1.0)


class Literal(NamedTuple):
    """Ground (or, inside rules, variable-bearing) atom ``(pred arg...)``.

    A predicate spelled with a leading ``~`` is the negation tag of the
    unprefixed predicate.
    """

    pred: str
    args: tuple

    @classmethod
    def of(cls, pred: str, *args: str) -> "Literal":
        return cls(pred, tuple(args))

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def negated(self) -> bool:
        return self.pred.startswith(NEGATION_PREFIX)

    @property
    def base(self) -> str:
        return self.pred[len(NEGATION_PREFIX):] if self.negated else self.pred

    def positive(self) -> "Literal":
        return Literal(self.base, self.args) if self.negated else self

    def negate(self) -> "Literal":
        if self.negated:
            return Literal(self.base, self.args)
        return Literal(NEGATION_PREFIX + self.pred, self.args)

    def has_variables(self) -> bool:
        return any(is_variable(a) for a in self.args)

    def __str__(self):
        return "(" + " ".join((self.pred,) + self.args) + ")"


def is_variable(symbol: str) -> bool:
    return symbol.startswith("?")
