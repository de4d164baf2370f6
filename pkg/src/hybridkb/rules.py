"""Plausible (monotonic, weighted) and NMJ (default) rule definitions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .certainty import Certainty, Literal, is_variable


def literal_variables(lit: Literal) -> set:
    return {a for a in lit.args if is_variable(a)}


@dataclass(frozen=True)
class PlausibleRule:
    """Horn rule ``antecedent => consequent`` with an uncertainty weight.

    Possibilistic rules carry ``sufficiency``; probabilistic rules carry
    ``given`` = P(B|A) and ``given_not`` = P(B|not A) as intervals.
    Arguments beginning with ``?`` are variables; every variable of the
    consequent must occur in the antecedent.
    """

    name: str
    antecedent: tuple
    consequent: Literal
    sufficiency: Optional[Certainty] = None
    given: Optional[Certainty] = None
    given_not: Optional[Certainty] = None

    @property
    def probabilistic(self) -> bool:
        return self.given is not None

    def validate(self) -> None:
        if not self.antecedent:
            raise ValueError(f"rule {self.name}: empty antecedent")
        if self.probabilistic == (self.sufficiency is not None):
            raise ValueError(f"rule {self.name}: give a sufficiency or a pair of conditional probabilities")
        if self.probabilistic and self.given_not is None:
            raise ValueError(f"rule {self.name}: missing P(B | not A)")
        bound = set().union(*(literal_variables(a) for a in self.antecedent))
        free = literal_variables(self.consequent) - bound
        if free:
            raise ValueError(f"rule {self.name}: consequent variables {sorted(free)} not bound by the antecedent")


@dataclass(frozen=True)
class NmjRule:
    """Default: conclude ``then`` with ``degree`` unless ``unless`` has support >= threshold.

    ``threshold=None`` defers to the engine-wide default.
    """

    name: str
    unless: Literal
    threshold: Optional[float]
    then: Literal
    degree: float

    def validate(self) -> None:
        if self.threshold is not None and not 0 < self.threshold < 1:
            raise ValueError(f"default {self.name}: threshold must lie in (0, 1)")
        if not 0 <= self.degree <= 1:
            raise ValueError(f"default {self.name}: degree must lie in [0, 1]")
        free = literal_variables(self.then) - literal_variables(self.unless)
        if free:
            raise ValueError(f"default {self.name}: variables {sorted(free)} of the conclusion do not occur in :unless")
