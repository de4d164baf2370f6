"""Independent reference implementations used by the test-suite.

Nothing here goes through normal forms or structural subsumption. Concept
expressions are evaluated directly by their set-theoretic reading over
explicit finite interpretations; interpretations are enumerated in batches as
numpy boolean arrays so a whole family of models is checked in one pass.
"""

from __future__ import annotations

import itertools
import random

import numpy as np

from hybridkb.language import All, AtLeast, AtMost, ConceptAnd, NamedRef, Primitive, RoleAnd


# --------------------------------------------------------------------------
# Interpretations


class Models:
    """All interpretations of a signature over a domain of size ``d``.

    ``concepts[name]`` has shape (N, d) and ``relations[name]`` shape
    (N, d, d); row k of every array is one interpretation.
    """

    def __init__(self, concept_names, relation_names, d):
        self.d = d
        bits = len(concept_names) * d + len(relation_names) * d * d
        n = 1 << bits
        codes = np.arange(n, dtype=np.int64)
        table = ((codes[:, None] >> np.arange(bits)) & 1).astype(bool)
        self.n = n
        self.concepts = {}
        self.relations = {}
        col = 0
        for name in concept_names:
            self.concepts[name] = table[:, col:col + d]
            col += d
        for name in relation_names:
            self.relations[name] = table[:, col:col + d * d].reshape(n, d, d)
            col += d * d


def interpret_role(expr, models, tbox=None):
    if isinstance(expr, NamedRef):
        definition = tbox.relation_definition(expr.name) if tbox is not None else None
        if definition is None:
            return models.relations[expr.name]
        return interpret_role(definition, models, tbox)
    if isinstance(expr, Primitive):
        return models.relations[expr.name]
    if isinstance(expr, RoleAnd):
        out = interpret_role(expr.children[0], models, tbox)
        for c in expr.children[1:]:
            out = out & interpret_role(c, models, tbox)
        return out
    raise TypeError(expr)


def interpret(expr, models, tbox=None):
    """Extension of a concept expression in every model: bool array (N, d)."""
    shape = (models.n, models.d)
    if isinstance(expr, NamedRef):
        if expr.name == "Top":
            return np.ones(shape, bool)
        if expr.name == "Bottom":
            return np.zeros(shape, bool)
        if tbox is not None and tbox.is_concept(expr.name):
            return interpret(tbox.concept_definition(expr.name), models, tbox)
        return models.concepts[expr.name]
    if isinstance(expr, Primitive):
        return models.concepts[expr.name]
    if isinstance(expr, ConceptAnd):
        out = interpret(expr.children[0], models, tbox)
        for c in expr.children[1:]:
            out = out & interpret(c, models, tbox)
        return out
    if isinstance(expr, All):
        r = interpret_role(expr.role, models, tbox)
        c = interpret(expr.filler, models, tbox)
        return np.all(~r | c[:, None, :], axis=2)
    if isinstance(expr, AtLeast):
        return np.count_nonzero(interpret_role(expr.role, models, tbox), axis=2) >= expr.n
    if isinstance(expr, AtMost):
        return np.count_nonzero(interpret_role(expr.role, models, tbox), axis=2) <= expr.n
    raise TypeError(expr)


# --------------------------------------------------------------------------
# Classical evaluation over one explicit store


def holds(expr, x, concepts, roles) -> bool:
    """Classical truth of ``expr`` at ``x``; ``concepts`` is a set of (name, x),
    ``roles`` a set of (relation, x, y), read as a complete (closed) model."""

    def role_pairs(r):
        if isinstance(r, NamedRef):
            return {(a, b) for (name, a, b) in roles if name == r.name}
        if isinstance(r, RoleAnd):
            sets = [role_pairs(c) for c in r.children]
            return set.intersection(*sets)
        raise TypeError(r)

    def fillers(r, x):
        return sorted(b for a, b in role_pairs(r) if a == x)

    if isinstance(expr, NamedRef):
        if expr.name == "Top":
            return True
        return (expr.name, x) in concepts
    if isinstance(expr, ConceptAnd):
        return all(holds(c, x, concepts, roles) for c in expr.children)
    if isinstance(expr, All):
        return all(holds(expr.filler, y, concepts, roles) for y in fillers(expr.role, x))
    if isinstance(expr, AtLeast):
        return len(fillers(expr.role, x)) >= expr.n
    if isinstance(expr, AtMost):
        return len(fillers(expr.role, x)) <= expr.n
    raise TypeError(expr)


# --------------------------------------------------------------------------
# Random expressions


def random_role(rng: random.Random, relations):
    if len(relations) > 1 and rng.random() < 0.25:
        names = rng.sample(relations, 2)
        return RoleAnd(tuple(NamedRef(n) for n in names))
    return NamedRef(rng.choice(relations))


def random_concept(rng: random.Random, depth, concepts, relations, max_n=2):
    """Random concept expression of nesting depth at most ``depth``."""
    if depth <= 1:
        kinds = ["name", "name", "atleast", "atmost"]
    else:
        kinds = ["name", "and", "and", "all", "all", "atleast", "atmost"]
    kind = rng.choice(kinds)
    if kind == "name":
        return NamedRef(rng.choice(concepts))
    if kind == "and":
        k = rng.choice([2, 2, 3])
        return ConceptAnd(tuple(random_concept(rng, depth - 1, concepts, relations, max_n) for _ in range(k)))
    if kind == "all":
        return All(random_role(rng, relations), random_concept(rng, depth - 1, concepts, relations, max_n))
    n = rng.randint(0, max_n)
    role = random_role(rng, relations)
    return AtLeast(n, role) if kind == "atleast" else AtMost(n, role)


def random_store(rng: random.Random, instances, concepts, relations, p=0.4):
    cset = {(c, x) for c in concepts for x in instances if rng.random() < p}
    rset = {(r, x, y) for r in relations for x in instances for y in instances if rng.random() < p}
    return cset, rset


# --------------------------------------------------------------------------
# Graphs


def mutual_reachability_classes(nodes, edges):
    """Partition of ``nodes`` into classes of mutually reachable nodes (Warshall closure)."""
    nodes = list(nodes)
    idx = {n: i for i, n in enumerate(nodes)}
    m = np.eye(len(nodes), dtype=bool)
    for a, b in edges:
        m[idx[a], idx[b]] = True
    for k in range(len(nodes)):
        m |= m[:, k:k + 1] & m[k:k + 1, :]
    both = m & m.T
    classes = {frozenset(nodes[j] for j in np.flatnonzero(both[i])) for i in range(len(nodes))}
    return classes, m, idx


def transitive_reduction(order_pairs, items):
    """Hasse edges of a strict partial order given as the set of (greater, smaller) pairs."""
    out = set()
    for a, b in order_pairs:
        if not any((a, c) in order_pairs and (c, b) in order_pairs for c in items if c not in (a, b)):
            out.add((a, b))
    return out


# --------------------------------------------------------------------------
# Probability and defaults


def grid(lo, hi, step=0.01):
    pts = np.arange(lo, hi, step)
    return np.unique(np.append(pts, hi))


def total_probability_grid(p_a, given, given_not, step=0.01):
    """(min, max) of w*p + w'*(1-p) over step grids of the three intervals."""
    p = grid(p_a.lower, p_a.upper, step)[:, None, None]
    w = grid(given.lower, given.upper, step)[None, :, None]
    v = grid(given_not.lower, given_not.upper, step)[None, None, :]
    values = w * p + v * (1 - p)
    return float(values.min()), float(values.max()), values


def default_extensions(defaults, threshold):
    """Propositional defaults (name, unless, then, degree) over atoms with no other support.

    Enumerates every firing subset, keeps those where each fired default's
    justification stays below the threshold, and returns the list of
    (fired names, {atom: lower}) for the subset-maximal ones.
    """
    consistent = []
    for k in range(len(defaults) + 1):
        for subset in itertools.combinations(defaults, k):
            lows = {}
            for _, _, then, degree in subset:
                lows[then] = max(lows.get(then, 0.0), degree)
            if all(lows.get(unless, 0.0) < threshold for _, unless, _, _ in subset):
                consistent.append((frozenset(d[0] for d in subset), lows))
    return [(f, l) for f, l in consistent if not any(f < g for g, _ in consistent)]


def random_tbox(rng: random.Random, concepts=("A", "B"), relations=("R",), size=(3, 6)):
    """Random acyclic TBox; later definitions may mention earlier defined names."""
    from hybridkb import TBox

    tbox = TBox()
    for c in concepts:
        tbox.declare_concept(c)
    for r in relations:
        tbox.declare_relation(r)
    names = list(concepts)
    for i in range(rng.randint(*size)):
        name = f"C{i}"
        tbox.define_concept(name, random_concept(rng, rng.randint(1, 3), names, list(relations)))
        names.append(name)
    return tbox


def countermodel_exists(tbox, general, specific, models_list, cache=None):
    """True when some interpretation puts an element in ``specific`` but not in ``general``.

    ``cache`` (a dict) memoizes extensions across calls on the same TBox.
    """
    cache = {} if cache is None else cache

    def ext(name, i):
        if (name, i) not in cache:
            cache[name, i] = interpret(NamedRef(name), models_list[i], tbox)
        return cache[name, i]

    for i in range(len(models_list)):
        g, s = ext(general, i), ext(specific, i)
        if (s & ~g).any():
            return True
    return False
