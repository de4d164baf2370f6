"""Graded satisfaction of term expressions.

``mu(x, nf, store)`` measures how far instance ``x`` satisfies a normalized
concept when memberships and role fillers carry degrees. Value restrictions
are softened either through a fuzzy implication or through conditional
possibility; number restrictions are softened through sigma-counts fed into
piecewise-linear fuzzy numbers. Degrees are computed over the fillers the
store knows about.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

from .certainty import Certainty, UNKNOWN
from .errors import IncoherentConcept
from .normal import TOP, NormalForm

IMPLICATIONS = ("kleene-dienes", "goedel", "lukasiewicz", "goguen")
ALL_SEMANTICS = ("implication", "possibility")
CONJUNCTIONS = ("min-scalar", "tnorm-interval")
TNORM_FAMILIES = ("min", "product", "lukasiewicz")


@dataclass(frozen=True)
class DegreeConfig:
    implication: str = "kleene-dienes"
    all_semantics: str = "implication"
    conjunction: str = "min-scalar"
    tnorm: str = "min"

    def __post_init__(self):
        for value, allowed, what in (
            (self.implication, IMPLICATIONS, "implication"),
            (self.all_semantics, ALL_SEMANTICS, "all-semantics"),
            (self.conjunction, CONJUNCTIONS, "conjunction"),
            (self.tnorm, TNORM_FAMILIES, "tnorm"),
        ):
            if value not in allowed:
                raise ValueError(f"unknown {what} {value!r}; choose one of {', '.join(allowed)}")


DEFAULT_CONFIG = DegreeConfig()


def _clamp(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


# --------------------------------------------------------------------------
# Operators


def implication(a: float, b: float, kind: str = "kleene-dienes") -> float:
    if kind == "kleene-dienes":
        return max(1.0 - a, b)
    if kind == "goedel":
        return 1.0 if a <= b else b
    if kind == "lukasiewicz":
        return min(1.0, 1.0 - a + b)
    if kind == "goguen":
        return 1.0 if a == 0 else min(1.0, b / a)
    raise ValueError(f"unknown implication {kind!r}")


def tnorm(a: float, b: float, family: str = "min") -> float:
    if family == "min":
        return min(a, b)
    if family == "product":
        return a * b
    if family == "lukasiewicz":
        return max(0.0, a + b - 1.0)
    raise ValueError(f"unknown t-norm family {family!r}")


def tconorm(a: float, b: float, family: str = "min") -> float:
    """Dual of ``tnorm``: max, probabilistic sum, bounded sum."""
    if family == "min":
        return max(a, b)
    if family == "product":
        return a + b - a * b
    if family == "lukasiewicz":
        return min(1.0, a + b)
    raise ValueError(f"unknown t-norm family {family!r}")


def interval_conjunction(a: Certainty, b: Certainty) -> Certainty:
    """Bounds of a conjunction of two graded memberships: Lukasiewicz below, min above."""
    return Certainty(max(0.0, a.lower + b.lower - 1.0), min(a.upper, b.upper))


def mu_at_least(n: int, s: float) -> float:
    if n <= 0 or s >= n:
        return 1.0
    if s <= n - 1:
        return 0.0
    return _clamp(s - n + 1)


def mu_at_most(n: int, s: float) -> float:
    # middle branch is n + 1 - s so the function is continuous at n and n + 1
    if s <= n:
        return 1.0
    if s >= n + 1:
        return 0.0
    return _clamp(n + 1 - s)


# --------------------------------------------------------------------------
# Stores


class DegreeStore:
    """Dictionary-backed memberships for degree computation.

    ``concepts`` maps ``(concept, x)`` and ``roles`` maps ``(relation, x, y)``
    to a Certainty or a scalar degree. Absent memberships read as ``absent``:
    total ignorance by default, ``[0, 0]`` for a closed-world store.
    """

    def __init__(self, concepts=None, roles=None, absent: Certainty = UNKNOWN):
        self.absent = Certainty.coerce(absent)
        self.concepts = {k: Certainty.coerce(v) for k, v in (concepts or {}).items()}
        self.roles = {k: Certainty.coerce(v) for k, v in (roles or {}).items()}
        self._by_subject = {}
        for (r, x, y), c in self.roles.items():
            self._by_subject.setdefault(x, {}).setdefault(y, {})[r] = c

    def concept_degree(self, name: str, x: str) -> Certainty:
        return self.concepts.get((name, x), self.absent)

    def fillers(self, role: frozenset, x: str) -> list:
        out = []
        for y, rels in sorted(self._by_subject.get(x, {}).items()):
            if role <= rels.keys():
                parts = [rels[r] for r in sorted(role)]
                out.append((y, Certainty(min(p.lower for p in parts), min(p.upper for p in parts))))
        return out


# --------------------------------------------------------------------------
# Degrees of individual constraints


def sigma_count(x: str, role: frozenset, store) -> float:
    return sum(c.lower for _, c in store.fillers(role, x))


def _filler_degree(y, filler: NormalForm, store, cfg) -> float:
    if filler.bottom:
        return 0.0
    if filler == TOP:
        return 1.0
    return mu(y, filler, store, cfg).lower


def mu_all_implication(x, role: frozenset, filler: NormalForm, store, cfg: DegreeConfig = DEFAULT_CONFIG) -> float:
    degrees = [implication(c.lower, _filler_degree(y, filler, store, cfg), cfg.implication)
               for y, c in store.fillers(role, x)]
    return min(degrees, default=1.0)


def mu_all_possibility(x, role: frozenset, filler: NormalForm, store, cfg: DegreeConfig = DEFAULT_CONFIG) -> float:
    pairs = [(c.lower, _filler_degree(y, filler, store, cfg)) for y, c in store.fillers(role, x)]
    denominator = max((r for r, _ in pairs), default=0.0)
    if denominator == 0.0:
        return 1.0
    numerator = max(min(1.0 - f, r) for r, f in pairs)
    return _clamp(1.0 - numerator / denominator)


def mu(x: str, nf: NormalForm, store, cfg: DegreeConfig = DEFAULT_CONFIG) -> Certainty:
    """Degree to which ``x`` satisfies ``nf``, as a point or an interval."""
    if nf.bottom:
        raise IncoherentConcept("cannot grade membership in an incoherent concept")
    parts = [store.concept_degree(p, x) for p in sorted(nf.primitives)]
    for rc in nf.roles:
        if rc.value != TOP:
            if cfg.all_semantics == "possibility":
                v = mu_all_possibility(x, rc.role, rc.value, store, cfg)
            else:
                v = mu_all_implication(x, rc.role, rc.value, store, cfg)
            parts.append(Certainty.point(v))
        if rc.min > 0 or rc.max is not None:
            s = sigma_count(x, rc.role, store)
            if rc.min > 0:
                parts.append(Certainty.point(mu_at_least(rc.min, s)))
            if rc.max is not None:
                parts.append(Certainty.point(mu_at_most(rc.max, s)))
    if not parts:
        return Certainty(1.0, 1.0)
    if cfg.conjunction == "tnorm-interval":
        return reduce(interval_conjunction, parts)
    m = min(p.lower for p in parts)
    return Certainty(m, m)
