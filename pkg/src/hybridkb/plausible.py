"""Approximate reasoner: interval certainties propagated over a ground rule graph.

Plausible rules are grounded against the known literals and every ground
literal becomes a node. Possibilistic rules detach ``[T(a, s), 1]`` onto
their conclusion (or a refutation ``[0, 1 - T(a, s)]`` when the conclusion
carries the ``~`` negation tag); probabilistic rules use total probability.
Contributions meet at a node through a T-conorm on lower bounds and ``min``
on upper bounds.

Default (NMJ) rules may form cycles. The graph is condensed into strongly
connected components and processed in topological order; inside a component
holding defaults every subset of firings is tried and the maximal consistent
one with the largest total support wins.
"""

from __future__ import annotations

import graphlib
import itertools
import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Optional, Protocol

from .certainty import Certainty, Literal, UNKNOWN, is_variable
from .errors import CyclicMonotonicRules, SccTooLarge
from .fuzzy import TNORM_FAMILIES, tconorm, tnorm
from .rules import NmjRule, PlausibleRule

log = logging.getLogger(__name__)

CONORM_ALIASES = {"max": "min", "probabilistic-sum": "product", "bounded-sum": "lukasiewicz"}
DEFAULT_THRESHOLD = 0.5
DEFAULT_SCC_BOUND = 10


def _fmt(c: Certainty) -> str:
    return f"[{c.lower:g},{c.upper:g}]"


# --------------------------------------------------------------------------
# Probability emulation


def propagate_probability(p_a: Certainty, given: Certainty, given_not: Certainty) -> Certainty:
    """Interval P(B) by total probability from P(A), P(B|A) and P(B|not A).

    ``w*p + w'*(1-p)`` is increasing in both weights and linear in ``p``, so
    the extremes sit at interval endpoints.
    """
    lows = [given.lower * p + given_not.lower * (1.0 - p) for p in (p_a.lower, p_a.upper)]
    highs = [given.upper * p + given_not.upper * (1.0 - p) for p in (p_a.lower, p_a.upper)]
    lo = min(max(0.0, x) for x in lows)
    hi = max(min(1.0, x) for x in highs)
    return Certainty(min(lo, hi), hi)


# --------------------------------------------------------------------------
# Condensation


@dataclass(frozen=True)
class Condensation:
    components: tuple  # frozensets, in topological order
    edges: frozenset  # (i, j) component index pairs
    index: dict

    def component_of(self, node):
        return self.components[self.index[node]]


def condense(nodes, edges) -> Condensation:
    """Strongly connected components (Tarjan) and the DAG between them."""
    succ = {n: set() for n in nodes}
    for a, b in edges:
        succ.setdefault(a, set()).add(b)
        succ.setdefault(b, set())
    order = sorted(succ, key=str)
    adj = {n: sorted(succ[n], key=str) for n in order}
    index, low, on_stack = {}, {}, set()
    stack, found = [], []
    counter = itertools.count()
    for root in order:
        if root in index:
            continue
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(adj[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = next(counter)
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    advanced = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == v:
                        break
                found.append(frozenset(comp))
    components = tuple(reversed(found))
    where = {n: i for i, comp in enumerate(components) for n in comp}
    dag = frozenset((where[a], where[b]) for a, b in edges if where[a] != where[b])
    return Condensation(components, dag, where)


# --------------------------------------------------------------------------
# Ground structures


class DerivedNodes(Protocol):
    """Extra node kind whose contribution is computed from other nodes."""

    def predicate_dependencies(self) -> dict: ...

    def ground(self, known: frozenset) -> dict: ...

    def evaluate(self, node: Literal, value: Callable, known: frozenset) -> Certainty: ...


@dataclass(frozen=True, order=True)
class GroundRule:
    name: str
    antecedent: tuple
    consequent: Literal
    rule: PlausibleRule = field(compare=False)

    @property
    def key(self):
        return ("rule", self.name, self.antecedent, self.consequent)


@dataclass(frozen=True, order=True)
class GroundDefault:
    name: str
    unless: Literal
    then: Literal
    threshold: float
    degree: float

    @property
    def key(self):
        return ("default", self.name, self.unless, self.then)

    def enabled(self, value: Callable) -> bool:
        return value(self.unless).lower < self.threshold


@dataclass(frozen=True)
class Contribution:
    kind: str  # input | rule | default | term
    name: str
    certainty: Certainty


def _match(pattern: Literal, fact: Literal, binding: dict) -> Optional[dict]:
    if pattern.base != fact.pred or len(pattern.args) != len(fact.args):
        return None
    out = binding
    for p, f in zip(pattern.args, fact.args):
        if is_variable(p):
            bound = out.get(p)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[p] = f
            elif bound != f:
                return None
        elif p != f:
            return None
    return out


def _substitute(pattern: Literal, binding: dict) -> Literal:
    return Literal(pattern.pred, tuple(binding.get(a, a) for a in pattern.args))


def ground_rule(rule: PlausibleRule, known: dict) -> list:
    """All ground instances whose antecedent literals are known nodes.

    ``known`` maps predicate name to a sorted list of positive ground literals.
    """
    bindings = [{}]
    for pattern in rule.antecedent:
        nxt = []
        for b in bindings:
            for fact in known.get(pattern.base, ()):
                m = _match(pattern, fact, b)
                if m is not None:
                    nxt.append(m)
        bindings = nxt
        if not bindings:
            return []
    out = set()
    for b in bindings:
        out.add(GroundRule(rule.name, tuple(_substitute(a, b) for a in rule.antecedent),
                           _substitute(rule.consequent, b), rule))
    return sorted(out)


@dataclass
class GroundGraph:
    nodes: frozenset = frozenset()
    inputs: dict = field(default_factory=dict)  # node -> sorted input literals
    rules: dict = field(default_factory=dict)  # node -> [GroundRule]
    defaults: dict = field(default_factory=dict)  # node -> [GroundDefault]
    term: dict = field(default_factory=dict)  # node -> deps
    monotonic: frozenset = frozenset()
    nmj: frozenset = frozenset()
    condensation: Condensation = None
    upstream: tuple = ()

    def signature(self, node):
        return (
            tuple(self.inputs.get(node, ())),
            tuple(r.key for r in self.rules.get(node, ())),
            tuple(d.key for d in self.defaults.get(node, ())),
            self.term.get(node),
        )


# --------------------------------------------------------------------------
# SCC evaluation


@dataclass(frozen=True)
class SccChoice:
    fired: frozenset
    values: dict


def evaluate_scc(component, defaults, compute: Callable) -> SccChoice:
    """Choose the firing set for defaults whose justification lies inside ``component``.

    ``compute(fired)`` returns the component's node values when exactly the
    defaults in ``fired`` contribute. A firing set is consistent when each of
    its defaults stays enabled under the values it produces. Among the
    maximal consistent sets the one with the largest summed lower bound over
    the component wins; ties go to the lexicographically smallest list of
    rule names.
    """
    defaults = sorted(defaults)
    nodes = sorted(component, key=str)
    consistent = []
    for k in range(len(defaults) + 1):
        for subset in itertools.combinations(defaults, k):
            fired = frozenset(subset)
            values = compute(fired)

            def value(lit, values=values):
                c = values.get(lit.positive(), UNKNOWN)
                return c.complement() if lit.negated else c

            if all(d.enabled(value) for d in subset):
                consistent.append((fired, values))
    maximal = [(f, v) for f, v in consistent if not any(f < g for g, _ in consistent)]

    def rank(item):
        fired, values = item
        support = sum(values[n].lower for n in nodes if n in values)
        names = tuple(sorted((d.name, str(d.unless), str(d.then)) for d in fired))
        return (-support, names)

    fired, values = min(maximal, key=rank)
    return SccChoice(fired, values)


# --------------------------------------------------------------------------
# Engine


class PlausibleEngine:
    """Rule graph plus current certainties, updated incrementally on each change."""

    def __init__(self, tnorm_family: str = "min", conorm: str = "max", scc_bound: int = DEFAULT_SCC_BOUND,
                 threshold: float = DEFAULT_THRESHOLD, derived: Optional[DerivedNodes] = None):
        conorm = CONORM_ALIASES.get(conorm, conorm)
        if tnorm_family not in TNORM_FAMILIES:
            raise ValueError(f"unknown t-norm family {tnorm_family!r}")
        if conorm not in TNORM_FAMILIES:
            raise ValueError(f"unknown t-conorm {conorm!r}")
        if not 0 < threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        self.tnorm_family = tnorm_family
        self.conorm_family = conorm
        self.scc_bound = scc_bound
        self.threshold = threshold
        self.derived_nodes = derived
        self.rules: list[PlausibleRule] = []
        self.defaults: list[NmjRule] = []
        self._inputs: dict[Literal, Certainty] = {}
        self._values: dict[Literal, Certainty] = {}
        self._contribs: dict[Literal, tuple] = {}
        self.graph = GroundGraph()
        self.graph.condensation = condense((), ())
        self.trace: list[str] = []
        self.conflicts: dict[Literal, tuple] = {}

    # -- structure --------------------------------------------------------

    def _check_acyclic(self, rules):
        sorter = graphlib.TopologicalSorter()
        for rule in rules:
            for a in rule.antecedent:
                sorter.add(rule.consequent.base, a.base)
        if self.derived_nodes is not None:
            for pred, deps in self.derived_nodes.predicate_dependencies().items():
                for dep in deps:
                    sorter.add(pred, dep)
        try:
            sorter.prepare()
        except graphlib.CycleError as exc:
            cycle = " -> ".join(exc.args[1])
            raise CyclicMonotonicRules(f"monotonic rules form a cycle: {cycle}") from None

    def add_rule(self, rule: PlausibleRule) -> GroundGraph:
        rule.validate()
        rules = [r for r in self.rules if r.name != rule.name] + [rule]
        self._check_acyclic(rules)
        old = self.rules
        self.rules = rules
        try:
            self._update(None)
        except SccTooLarge:
            self.rules = old
            raise
        return self.graph

    def add_default(self, rule: NmjRule) -> GroundGraph:
        rule.validate()
        old = self.defaults
        self.defaults = [d for d in self.defaults if d.name != rule.name] + [rule]
        try:
            self._update(None)
        except SccTooLarge:
            self.defaults = old
            raise
        return self.graph

    def refresh(self) -> None:
        """Recompute everything, e.g. after the derived-node provider changed."""
        self._check_acyclic(self.rules)
        self._update(None)

    # -- inputs -----------------------------------------------------------

    def set_input(self, literal: Literal, certainty) -> None:
        self.update_inputs({**self._inputs, literal: Certainty.coerce(certainty)})

    def retract(self, literal: Literal) -> bool:
        """Drop an external input; returns False (and changes nothing) if absent."""
        if literal not in self._inputs:
            log.warning("retract: %s is not an input", literal)
            return False
        inputs = dict(self._inputs)
        del inputs[literal]
        self.update_inputs(inputs)
        return True

    def update_inputs(self, inputs: dict) -> None:
        inputs = {lit: Certainty.coerce(c) for lit, c in inputs.items()}
        changed = {lit.positive() for lit in set(inputs) | set(self._inputs)
                   if inputs.get(lit) != self._inputs.get(lit)}
        old = self._inputs
        self._inputs = inputs
        try:
            self._update(changed)
        except SccTooLarge:
            self._inputs = old
            raise

    @property
    def inputs(self) -> dict:
        return dict(self._inputs)

    # -- queries ----------------------------------------------------------

    def value(self, literal: Literal) -> Certainty:
        c = self._values.get(literal.positive(), UNKNOWN)
        return c.complement() if literal.negated else c

    def values(self) -> dict:
        return dict(self._values)

    def contributions(self, literal: Literal) -> tuple:
        return self._contribs.get(literal.positive(), ())

    def derived(self, literal: Literal, kinds=("rule", "default", "term")) -> Certainty:
        """Aggregate of the node's contributions of the given kinds (inputs excluded by default)."""
        parts = [c.certainty for c in self.contributions(literal) if c.kind in kinds]
        result = self._aggregate(parts)[0]
        return result.complement() if literal.negated else result

    def snapshot(self) -> tuple:
        return (
            tuple(sorted((str(k), v.lower, v.upper) for k, v in self._inputs.items())),
            tuple(sorted((str(k), v.lower, v.upper) for k, v in self._values.items())),
        )

    # -- grounding --------------------------------------------------------

    def _ground(self) -> GroundGraph:
        known = {lit.positive() for lit in self._inputs}
        while True:
            size = len(known)
            frozen = frozenset(known)
            term = self.derived_nodes.ground(frozen) if self.derived_nodes is not None else {}
            known.update(term)
            index = {}
            for lit in sorted(known):
                index.setdefault(lit.pred, []).append(lit)
            instances = [g for rule in self.rules for g in ground_rule(rule, index)]
            known.update(g.consequent.positive() for g in instances)
            domain = sorted({a for lit in known for a in lit.args})
            ground_defaults = []
            for rule in self.defaults:
                variables = sorted({a for a in rule.unless.args + rule.then.args if is_variable(a)})
                for combo in itertools.product(domain, repeat=len(variables)):
                    b = dict(zip(variables, combo))
                    threshold = self.threshold if rule.threshold is None else rule.threshold
                    ground_defaults.append(GroundDefault(rule.name, _substitute(rule.unless, b),
                                                         _substitute(rule.then, b), threshold, rule.degree))
            for g in ground_defaults:
                known.add(g.unless.positive())
                known.add(g.then.positive())
            if len(known) == size:
                break
        graph = GroundGraph(nodes=frozenset(known))
        for lit in sorted(self._inputs):
            graph.inputs.setdefault(lit.positive(), []).append(lit)
        monotonic, nmj = set(), set()
        for g in sorted(set(instances)):
            graph.rules.setdefault(g.consequent.positive(), []).append(g)
            for a in g.antecedent:
                monotonic.add((a.positive(), g.consequent.positive()))
        for g in sorted(set(ground_defaults)):
            graph.defaults.setdefault(g.then.positive(), []).append(g)
            nmj.add((g.unless.positive(), g.then.positive()))
        for node, deps in term.items():
            graph.term[node] = tuple(deps)
            for d in deps:
                monotonic.add((d, node))
        graph.monotonic = frozenset(monotonic)
        graph.nmj = frozenset(nmj)
        graph.condensation = condense(graph.nodes, monotonic | nmj)
        upstream = [set() for _ in graph.condensation.components]
        where = graph.condensation.index
        for a, b in monotonic | nmj:
            if where[a] != where[b]:
                upstream[where[b]].add(a)
        graph.upstream = tuple(frozenset(u) for u in upstream)
        for comp in graph.condensation.components:
            if len(comp) > self.scc_bound:
                raise SccTooLarge(f"component of {len(comp)} nodes exceeds bound {self.scc_bound}: "
                                  + ", ".join(sorted(str(n) for n in comp)))
        return graph

    # -- evaluation -------------------------------------------------------

    def _aggregate(self, parts):
        lower = reduce(lambda a, b: tconorm(a, b, self.conorm_family), (p.lower for p in parts), 0.0)
        upper = min((p.upper for p in parts), default=1.0)
        if lower > upper:
            return Certainty(lower, lower), True
        return Certainty(lower, upper), False

    def _rule_contribution(self, g: GroundRule, value: Callable) -> Certainty:
        parts = [value(a) for a in g.antecedent]
        lo = reduce(lambda a, b: tnorm(a, b, self.tnorm_family), (p.lower for p in parts))
        hi = reduce(lambda a, b: tnorm(a, b, self.tnorm_family), (p.upper for p in parts))
        rule = g.rule
        if rule.probabilistic:
            result = propagate_probability(Certainty(lo, max(lo, hi)), rule.given, rule.given_not)
            return result.complement() if g.consequent.negated else result
        support = tnorm(lo, rule.sufficiency.lower, self.tnorm_family)
        if g.consequent.negated:
            return Certainty(0.0, 1.0 - support)
        return Certainty(support, 1.0)

    def _node_contributions(self, node, graph, value, fired) -> list:
        out = []
        for lit in graph.inputs.get(node, ()):
            c = self._inputs[lit]
            out.append(Contribution("input", "input", c.complement() if lit.negated else c))
        for g in graph.rules.get(node, ()):
            out.append(Contribution("rule", g.name, self._rule_contribution(g, value)))
        for d in graph.defaults.get(node, ()):
            if d in fired:
                c = Certainty(0.0, 1.0 - d.degree) if d.then.negated else Certainty(d.degree, 1.0)
                out.append(Contribution("default", d.name, c))
        if node in graph.term:
            c = self.derived_nodes.evaluate(node, value, graph.nodes)
            out.append(Contribution("term", f"def:{node.pred}", c))
        return out

    def _evaluate_component(self, comp, graph, values):
        internal, fired_outside = [], set()

        def outer(lit):
            c = values.get(lit.positive(), UNKNOWN)
            return c.complement() if lit.negated else c

        for node in comp:
            for d in graph.defaults.get(node, ()):
                if d.unless.positive() in comp:
                    internal.append(d)
                elif d.enabled(outer):
                    fired_outside.add(d)
        order = _stable_topological(comp, graph.monotonic)

        def compute(fired, keep=None):
            local = {}

            def value(lit):
                pos = lit.positive()
                c = local.get(pos) or values.get(pos, UNKNOWN)
                return c.complement() if lit.negated else c

            for node in order:
                contribs = self._node_contributions(node, graph, value, fired | fired_outside)
                result, conflict = self._aggregate([c.certainty for c in contribs])
                local[node] = result
                if keep is not None:
                    keep[node] = (tuple(contribs), conflict)
            return local

        if internal:
            choice = evaluate_scc(comp, internal, compute)
            fired = choice.fired
        else:
            fired = frozenset()
        keep = {}
        result = compute(fired, keep)
        return result, keep

    def _update(self, seeds) -> None:
        old_graph, old_values, old_contribs = self.graph, self._values, self._contribs
        graph = self._ground()
        if seeds is None:
            dirty = set(graph.nodes)
        else:
            dirty = {n for n in seeds if n in graph.nodes}
            for n in graph.nodes:
                if n not in old_graph.nodes or graph.signature(n) != old_graph.signature(n):
                    dirty.add(n)
        values, contribs, changed = {}, {}, set()
        trace = []
        conflicts = {k: v for k, v in self.conflicts.items() if k in graph.nodes}
        for i, comp in enumerate(graph.condensation.components):
            if comp & dirty or graph.upstream[i] & changed:
                result, keep = self._evaluate_component(comp, graph, values)
                for node in sorted(comp, key=str):
                    values[node] = result[node]
                    contribs[node], conflict = keep[node]
                    if conflict:
                        conflicts[node] = (result[node].lower, result[node].upper)
                        log.info("conflict at %s: lower exceeds upper", node)
                    else:
                        conflicts.pop(node, None)
                    old = old_values.get(node, UNKNOWN)
                    if result[node] != old or node not in old_values:
                        changed.add(node)
                        if result[node] != old:
                            vias = [c.name for c in contribs[node] if not c.certainty.is_vacuous]
                            trace.append(f"{node} old={_fmt(old)} new={_fmt(result[node])} "
                                         f"via={','.join(vias) or '-'}")
            else:
                for node in comp:
                    values[node] = old_values[node]
                    contribs[node] = old_contribs[node]
        for node in sorted(old_graph.nodes - graph.nodes, key=str):
            old = old_values.get(node, UNKNOWN)
            if old != UNKNOWN:
                trace.append(f"{node} old={_fmt(old)} new={_fmt(UNKNOWN)} via=-")
        self.graph, self._values, self._contribs = graph, values, contribs
        self.conflicts = conflicts
        self.trace = trace


def _stable_topological(comp, edges) -> list:
    """Deterministic topological order of ``comp`` along the given (acyclic) edges."""
    succ = {n: [] for n in comp}
    indeg = {n: 0 for n in comp}
    for a, b in edges:
        if a in comp and b in comp:
            succ[a].append(b)
            indeg[b] += 1
    import heapq

    heap = [(str(n), n) for n in comp if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, n = heapq.heappop(heap)
        order.append(n)
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, (str(m), m))
    if len(order) != len(comp):
        raise CyclicMonotonicRules("monotonic cycle inside a component")
    return order


def propagate(rules, inputs: dict, defaults=(), **config) -> dict:
    """One-shot propagation: node certainties for the given rules and inputs."""
    engine = PlausibleEngine(**config)
    for rule in rules:
        engine.rules.append(rule)
    for rule in defaults:
        engine.defaults.append(rule)
    engine._check_acyclic(engine.rules)
    engine.update_inputs(inputs)
    return engine.values()
