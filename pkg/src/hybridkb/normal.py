"""Canonical normal forms for concept expressions.

A normal form is a set of primitive concept names plus at most one
constraint per role, where a role is identified by its set of primitive
relation names. Constraints between comparable roles are saturated so that
structural subsumption can compare entries one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import CyclicDefinition, UnknownName
from .language import All, AtLeast, AtMost, ConceptAnd, NamedRef, Primitive, RoleAnd, TermExpr

TOP_NAME = "Top"
BOTTOM_NAME = "Bottom"


@dataclass(frozen=True)
class RoleConstraint:
    role: frozenset
    value: "NormalForm"
    min: int = 0
    max: Optional[int] = None  # None is unbounded

    @property
    def vacuous(self) -> bool:
        return self.value == TOP and self.min == 0 and self.max is None


@dataclass(frozen=True)
class NormalForm:
    primitives: frozenset = frozenset()
    roles: tuple = ()
    bottom: bool = False

    def role(self, role: frozenset) -> Optional[RoleConstraint]:
        for rc in self.roles:
            if rc.role == role:
                return rc
        return None

    def depth(self) -> int:
        return 1 + max((rc.value.depth() for rc in self.roles), default=0)


TOP = NormalForm()
BOTTOM = NormalForm(bottom=True)


def _as_dict(nf: NormalForm) -> dict:
    return {rc.role: [rc.value, rc.min, rc.max] for rc in nf.roles}


def _min_max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def _build(prims, entries) -> NormalForm:
    """Saturate role entries, detect incoherence and canonicalize."""
    entries = {r: list(v) for r, v in entries.items()}
    changed = True
    while changed:
        changed = False
        for r in entries:
            value, lo, hi = entries[r]
            if value.bottom and hi != 0:
                entries[r][2] = 0
                changed = True
            if hi is not None and lo > hi:
                return BOTTOM
        for r, general in entries.items():
            for r2, specific in entries.items():
                # r has fewer primitives, so r-fillers include every r2-filler
                if r == r2 or not r < r2:
                    continue
                hi = _min_max(specific[2], general[2])
                if hi != specific[2]:
                    specific[2] = hi
                    changed = True
                if general[0] != TOP:
                    value = conjoin(specific[0], general[0])
                    if value != specific[0]:
                        specific[0] = value
                        changed = True
                if specific[1] > general[1]:
                    general[1] = specific[1]
                    changed = True
    roles = []
    for r in sorted(entries, key=lambda s: tuple(sorted(s))):
        value, lo, hi = entries[r]
        if hi == 0:
            value = TOP  # no fillers, so the value restriction is moot
        rc = RoleConstraint(r, value, lo, hi)
        if not rc.vacuous:
            roles.append(rc)
    return NormalForm(frozenset(prims), tuple(roles), False)


def conjoin(*forms: NormalForm) -> NormalForm:
    """Normal form of the conjunction of already-normalized forms."""
    prims = set()
    entries = {}
    for nf in forms:
        if nf.bottom:
            return BOTTOM
        prims |= nf.primitives
        for r, (value, lo, hi) in _as_dict(nf).items():
            if r in entries:
                old = entries[r]
                entries[r] = [conjoin(old[0], value), max(old[1], lo), _min_max(old[2], hi)]
            else:
                entries[r] = [value, lo, hi]
    return _build(prims, entries)


def role_primitives(expr: TermExpr, tbox, _stack=()) -> frozenset:
    """Canonical identity of a relation expression: its primitive relation names."""
    if isinstance(expr, NamedRef):
        if expr.name in _stack:
            raise CyclicDefinition(" -> ".join(_stack + (expr.name,)))
        if tbox is None:
            return frozenset([expr.name])
        definition = tbox.relation_definition(expr.name)
        if definition is None:
            return frozenset([expr.name])
        return role_primitives(definition, tbox, _stack + (expr.name,))
    if isinstance(expr, Primitive):
        return frozenset([expr.name])
    if isinstance(expr, RoleAnd):
        out = frozenset()
        for child in expr.children:
            out |= role_primitives(child, tbox, _stack)
        return out
    raise TypeError(f"not a relation expression: {expr!r}")


def normalize(expr: TermExpr, tbox=None, _stack=()) -> NormalForm:
    """Unfold defined names and canonicalize ``expr``.

    ``tbox`` resolves names through ``concept_definition`` and
    ``relation_definition``; with ``tbox=None`` every name is treated as a
    primitive of its position's sort.
    """
    if isinstance(expr, NamedRef):
        if expr.name == TOP_NAME:
            return TOP
        if expr.name == BOTTOM_NAME:
            return BOTTOM
        if tbox is None:
            return NormalForm(frozenset([expr.name]))
        if expr.name in _stack:
            raise CyclicDefinition(" -> ".join(_stack + (expr.name,)))
        cached = tbox.cached_normal_form(expr.name)
        if cached is not None:
            return cached
        definition = tbox.concept_definition(expr.name)
        return normalize(definition, tbox, _stack + (expr.name,))
    if isinstance(expr, Primitive):
        return NormalForm(frozenset([expr.name]))
    if isinstance(expr, ConceptAnd):
        return conjoin(*(normalize(c, tbox, _stack) for c in expr.children))
    if isinstance(expr, All):
        value = normalize(expr.filler, tbox, _stack)
        return _build((), {role_primitives(expr.role, tbox): [value, 0, None]})
    if isinstance(expr, AtLeast):
        return _build((), {role_primitives(expr.role, tbox): [TOP, expr.n, None]})
    if isinstance(expr, AtMost):
        return _build((), {role_primitives(expr.role, tbox): [TOP, 0, expr.n]})
    if isinstance(expr, RoleAnd):
        raise TypeError("a relation expression is not a concept")
    raise TypeError(f"not a term expression: {expr!r}")


def denormalize(nf: NormalForm) -> TermExpr:
    """An expression whose normal form is ``nf`` (names refer to primitives)."""
    if nf.bottom:
        return NamedRef(BOTTOM_NAME)
    parts = [NamedRef(p) for p in sorted(nf.primitives)]
    for rc in nf.roles:
        names = sorted(rc.role)
        role = NamedRef(names[0]) if len(names) == 1 else RoleAnd(tuple(NamedRef(n) for n in names))
        if rc.value != TOP:
            parts.append(All(role, denormalize(rc.value)))
        if rc.min:
            parts.append(AtLeast(rc.min, role))
        if rc.max is not None:
            parts.append(AtMost(rc.max, role))
    if not parts:
        return NamedRef(TOP_NAME)
    if len(parts) == 1:
        return parts[0]
    return ConceptAnd(tuple(parts))


__all__ = [
    "BOTTOM", "BOTTOM_NAME", "NormalForm", "RoleConstraint", "TOP", "TOP_NAME",
    "UnknownName", "conjoin", "denormalize", "normalize", "role_primitives",
]
