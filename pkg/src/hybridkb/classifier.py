"""Deductive side: TBox, structural subsumption, classification and recognition."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .errors import CyclicDefinition, SortError, UnknownName
from .language import All, AtLeast, AtMost, ConceptAnd, NamedRef, Primitive, RoleAnd, TermExpr
from .normal import BOTTOM, BOTTOM_NAME, TOP, TOP_NAME, NormalForm, conjoin, normalize, role_primitives

RESERVED = (TOP_NAME, BOTTOM_NAME)


@dataclass
class ConceptEntry:
    expr: TermExpr
    primitive: bool
    nf: Optional[NormalForm] = None


def _is_primitive_definition(expr) -> bool:
    if isinstance(expr, Primitive):
        return True
    if isinstance(expr, ConceptAnd):
        return any(isinstance(c, Primitive) for c in expr.children)
    return False


def _names(expr, concepts, relations, position="concept"):
    if isinstance(expr, NamedRef):
        (concepts if position == "concept" else relations).add(expr.name)
    elif isinstance(expr, ConceptAnd):
        for c in expr.children:
            _names(c, concepts, relations, "concept")
    elif isinstance(expr, RoleAnd):
        for c in expr.children:
            _names(c, concepts, relations, "relation")
    elif isinstance(expr, All):
        _names(expr.role, concepts, relations, "relation")
        _names(expr.filler, concepts, relations, "concept")
    elif isinstance(expr, (AtLeast, AtMost)):
        _names(expr.role, concepts, relations, "relation")


class TBox:
    """Concept and relation definitions, kept acyclic.

    With ``auto_declare`` (the default) names referenced but never defined
    become primitive concepts or relations according to where they occur.
    """

    def __init__(self, auto_declare: bool = True):
        self.auto_declare = auto_declare
        self._concepts: dict[str, ConceptEntry] = {}
        self._relations: dict[str, Optional[TermExpr]] = {}

    # -- definition -------------------------------------------------------

    def _check_free(self, name, sort):
        if name in RESERVED:
            raise SortError(f"{name} is a reserved name")
        other = self._relations if sort == "concept" else self._concepts
        if name in other:
            raise SortError(f"{name} is already a {'relation' if sort == 'concept' else 'concept'}")

    def _declare_referenced(self, expr, defining=None):
        concepts, relations = set(), set()
        _names(expr, concepts, relations)
        for name in sorted(concepts - set(RESERVED)):
            if name in self._relations:
                raise SortError(f"{name} is a relation, expected a concept")
            if name not in self._concepts and name != defining:
                if not self.auto_declare:
                    raise UnknownName(name)
                self.declare_concept(name)
        for name in sorted(relations):
            if name in self._concepts or name in RESERVED:
                raise SortError(f"{name} is a concept, expected a relation")
            if name not in self._relations and name != defining:
                if not self.auto_declare:
                    raise UnknownName(name)
                self.declare_relation(name)

    def declare_concept(self, name: str) -> None:
        """Introduce ``name`` as a primitive concept unless it already exists."""
        if name in self._concepts:
            return
        self._check_free(name, "concept")
        self._concepts[name] = ConceptEntry(Primitive(name), True)

    def declare_relation(self, name: str) -> None:
        if name in self._relations:
            return
        self._check_free(name, "relation")
        self._relations[name] = None

    def _reaches(self, start_expr, target, sort) -> bool:
        seen = set()
        stack = [(start_expr, sort)]
        while stack:
            expr, position = stack.pop()
            concepts, relations = set(), set()
            _names(expr, concepts, relations, position)
            for name in concepts:
                if name == target and sort == "concept":
                    return True
                if ("c", name) not in seen and name in self._concepts:
                    seen.add(("c", name))
                    stack.append((self._concepts[name].expr, "concept"))
            for name in relations:
                if name == target and sort == "relation":
                    return True
                if ("r", name) not in seen and self._relations.get(name) is not None:
                    seen.add(("r", name))
                    stack.append((self._relations[name], "relation"))
        return False

    def define_concept(self, name: str, expr: TermExpr) -> None:
        self._check_free(name, "concept")
        if self._reaches(expr, name, "concept"):
            raise CyclicDefinition(f"definition of {name} refers to itself")
        self._declare_referenced(expr, defining=name)
        self._concepts[name] = ConceptEntry(expr, _is_primitive_definition(expr))
        self._invalidate()

    def define_relation(self, name: str, expr: Optional[TermExpr] = None) -> None:
        self._check_free(name, "relation")
        if expr is not None:
            if self._reaches(expr, name, "relation"):
                raise CyclicDefinition(f"definition of {name} refers to itself")
            relations = set()
            _names(expr, set(), relations, "relation")
            for rel in sorted(relations):
                if rel in self._concepts:
                    raise SortError(f"{rel} is a concept, expected a relation")
                if rel not in self._relations and rel != name:
                    if not self.auto_declare:
                        raise UnknownName(rel)
                    self.declare_relation(rel)
        self._relations[name] = expr
        self._invalidate()

    def _invalidate(self):
        for entry in self._concepts.values():
            entry.nf = None

    # -- lookup (the protocol ``normalize`` relies on) ---------------------

    def concept_definition(self, name: str) -> TermExpr:
        entry = self._concepts.get(name)
        if entry is None:
            if name in self._relations:
                raise SortError(f"{name} is a relation, expected a concept")
            raise UnknownName(name)
        return entry.expr

    def relation_definition(self, name: str) -> Optional[TermExpr]:
        if name not in self._relations:
            if name in self._concepts:
                raise SortError(f"{name} is a concept, expected a relation")
            raise UnknownName(name)
        return self._relations[name]

    def cached_normal_form(self, name: str) -> Optional[NormalForm]:
        entry = self._concepts.get(name)
        return entry.nf if entry is not None else None

    def normal_form(self, name: str) -> NormalForm:
        if name == TOP_NAME:
            return TOP
        if name == BOTTOM_NAME:
            return BOTTOM
        self.concept_definition(name)
        entry = self._concepts[name]
        if entry.nf is None:
            entry.nf = normalize(entry.expr, self, (name,))
        return entry.nf

    def role_primitives(self, name: str) -> frozenset:
        return role_primitives(NamedRef(name), self)

    # -- queries ----------------------------------------------------------

    def is_concept(self, name: str) -> bool:
        return name in self._concepts

    def is_relation(self, name: str) -> bool:
        return name in self._relations

    def is_primitive(self, name: str) -> bool:
        return self._concepts[name].primitive

    def concept_names(self) -> list:
        return list(self._concepts)

    def defined_concepts(self) -> list:
        return [n for n, e in self._concepts.items() if not e.primitive]

    def relation_names(self) -> list:
        return list(self._relations)

    def __contains__(self, name):
        return name in self._concepts or name in self._relations


# --------------------------------------------------------------------------
# Subsumption


def _effective_value(nf: NormalForm, role: frozenset) -> NormalForm:
    values = [rc.value for rc in nf.roles if rc.role <= role and rc.value != TOP]
    return conjoin(*values) if values else TOP


@lru_cache(maxsize=1 << 16)
def subsumes(general: NormalForm, specific: NormalForm) -> bool:
    """Structural test that every instance of ``specific`` is one of ``general``."""
    if specific.bottom:
        return True
    if general.bottom:
        return False
    if not general.primitives <= specific.primitives:
        return False
    for rc in general.roles:
        if rc.min > 0 and not any(rc.role <= e.role and e.min >= rc.min for e in specific.roles):
            return False
        if rc.max is not None and not any(
            e.role <= rc.role and e.max is not None and e.max <= rc.max for e in specific.roles
        ):
            return False
        if rc.value != TOP:
            if any(e.role <= rc.role and e.max == 0 for e in specific.roles):
                continue
            if not subsumes(rc.value, _effective_value(specific, rc.role)):
                return False
    return True


def coherent(nf: NormalForm) -> bool:
    return not nf.bottom


# --------------------------------------------------------------------------
# Taxonomy


def _label(names) -> str:
    return "=".join(sorted(names))


@dataclass(frozen=True)
class Taxonomy:
    """Subsumption DAG; each node is the set of mutually equivalent names."""

    nodes: tuple
    edges: frozenset  # (parent, child) pairs of node labels

    @property
    def top(self) -> frozenset:
        return next(n for n in self.nodes if TOP_NAME in n)

    @property
    def bottom(self) -> frozenset:
        return next(n for n in self.nodes if BOTTOM_NAME in n)

    def node_of(self, name: str) -> frozenset:
        for node in self.nodes:
            if name in node:
                return node
        raise UnknownName(name)

    def parents(self, node) -> list:
        node = self.node_of(node) if isinstance(node, str) else node
        return sorted((p for p, c in self.edges if c == node), key=_label)

    def children(self, node) -> list:
        node = self.node_of(node) if isinstance(node, str) else node
        return sorted((c for p, c in self.edges if p == node), key=_label)

    def pairs(self) -> list:
        return sorted((_label(p), _label(c)) for p, c in self.edges)

    def render_pairs(self) -> str:
        return "\n".join(f"{p} {c}" for p, c in self.pairs())

    def render_tree(self) -> str:
        lines = []
        bottom = self.bottom

        def walk(node, depth):
            lines.append("  " * depth + _label(node))
            for child in self.children(node):
                if child != bottom:
                    walk(child, depth + 1)

        walk(self.top, 0)
        if len(bottom) > 1:
            lines.append(f"{_label(bottom)} (incoherent)")
        return "\n".join(lines)


def classify(tbox: TBox) -> Taxonomy:
    forms = [(TOP_NAME, TOP), (BOTTOM_NAME, BOTTOM)] + [(n, tbox.normal_form(n)) for n in tbox.concept_names()]
    groups: list[list] = []  # [names, nf]
    for name, nf in forms:
        for group in groups:
            if subsumes(group[1], nf) and subsumes(nf, group[1]):
                group[0].append(name)
                break
        else:
            groups.append([[name], nf])
    nodes = [(frozenset(names), nf) for names, nf in groups]
    above = {
        (i, j)
        for i, (_, a) in enumerate(nodes)
        for j, (_, b) in enumerate(nodes)
        if i != j and subsumes(a, b)
    }
    edges = set()
    for i, j in above:
        if not any((i, k) in above and (k, j) in above for k in range(len(nodes))):
            edges.add((nodes[i][0], nodes[j][0]))
    return Taxonomy(tuple(sorted((n for n, _ in nodes), key=_label)), frozenset(edges))


# --------------------------------------------------------------------------
# Recognition


@dataclass
class CrispABox:
    """Certain facts only: concept memberships, role fillers and closed roles."""

    concepts: set = field(default_factory=set)  # (concept, x)
    roles: set = field(default_factory=set)  # (relation, x, y)
    closed: set = field(default_factory=set)  # (x, relation)

    def instances(self) -> set:
        out = {x for _, x in self.concepts}
        for _, x, y in self.roles:
            out.update((x, y))
        out.update(x for x, _ in self.closed)
        return out


class _Recognizer:
    def __init__(self, tbox: TBox, abox: CrispABox):
        self.tbox = tbox
        self.told = defaultdict(set)
        for c, x in abox.concepts:
            if tbox.is_concept(c):
                self.told[x].add(c)
        self.links = defaultdict(lambda: defaultdict(frozenset))  # x -> y -> primitive relations
        for r, x, y in abox.roles:
            if tbox.is_relation(r):
                self.links[x][y] |= tbox.role_primitives(r)
        self.closed = defaultdict(list)
        for x, r in abox.closed:
            if tbox.is_relation(r):
                self.closed[x].append(tbox.role_primitives(r))
        self._desc = {}
        self._memo = {}

    def description(self, x) -> NormalForm:
        if x not in self._desc:
            self._desc[x] = conjoin(*(self.tbox.normal_form(c) for c in sorted(self.told[x])))
        return self._desc[x]

    def fillers(self, x, role: frozenset) -> set:
        return {y for y, prims in self.links[x].items() if role <= prims}

    def possible_fillers(self, x, role: frozenset):
        sets = [self.fillers(x, q) for q in self.closed[x] if q <= role]
        if not sets:
            return None
        return set.intersection(*sets)

    def satisfies(self, x, nf: NormalForm) -> bool:
        key = (x, nf)
        if key not in self._memo:
            self._memo[key] = self._satisfies(x, nf)
        return self._memo[key]

    def _satisfies(self, x, nf: NormalForm) -> bool:
        if nf.bottom:
            return False
        desc = self.description(x)
        if subsumes(nf, desc):
            return True
        if not nf.primitives <= desc.primitives:
            return False
        for rc in nf.roles:
            told = [e for e in desc.roles]
            possible = self.possible_fillers(x, rc.role)
            if rc.min > 0:
                if len(self.fillers(x, rc.role)) < rc.min and not any(
                    rc.role <= e.role and e.min >= rc.min for e in told
                ):
                    return False
            if rc.max is not None:
                if not (possible is not None and len(possible) <= rc.max) and not any(
                    e.role <= rc.role and e.max is not None and e.max <= rc.max for e in told
                ):
                    return False
            if rc.value != TOP:
                by_closure = possible is not None and all(self.satisfies(y, rc.value) for y in sorted(possible))
                by_told = any(e.role <= rc.role and e.max == 0 for e in told) or subsumes(
                    rc.value, _effective_value(desc, rc.role)
                )
                if not (by_closure or by_told):
                    return False
        return True


def recognize(instance: str, tbox: TBox, abox: CrispABox) -> set:
    """Named concepts the instance provably belongs to, given certain facts."""
    return recognize_all(tbox, abox, [instance]).get(instance, set())


def recognize_all(tbox: TBox, abox: CrispABox, instances=None) -> dict:
    rec = _Recognizer(tbox, abox)
    if instances is None:
        instances = sorted(abox.instances())
    out = {}
    for x in instances:
        found = set()
        for name in tbox.concept_names():
            nf = tbox.normal_form(name)
            if not nf.bottom and rec.satisfies(x, nf):
                found.add(name)
        out[x] = found
    return out
