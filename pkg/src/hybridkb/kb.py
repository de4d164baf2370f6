"""Hybrid knowledge base: routes assertions between the two reasoners and answers queries.

Certain assertions live in the deductive view; degreed ones go to the
approximate engine only. After every mutation the two sides are brought to a
common fixpoint: recognition over the certain view yields deduced facts, the
engine propagates from asserted and deduced inputs, and engine conclusions
that reach exactly [1, 1] are promoted into the certain view.

Answers follow provenance precedence, not magnitude::

    asserted [1,1]  >  deduced  >  asserted with a degree  >  inferred
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

from .certainty import CERTAIN, UNKNOWN, Certainty, Literal
from .classifier import CrispABox, TBox, classify, recognize_all
from .errors import ArityError, DivergenceGuard, KBError, SortError, UnknownSymbol
from .fuzzy import DegreeConfig, mu
from .language import (
    Ask, CloseRole, DefConcept, DefDefault, DefRelation, DefRule, Forget, Tell, parse_program,
)
from .normal import TOP
from .plausible import DEFAULT_SCC_BOUND, DEFAULT_THRESHOLD, PlausibleEngine

log = logging.getLogger(__name__)

ASSERTED = "asserted"
DEDUCED = "deduced"
INFERRED = "inferred"
SYNC_LIMIT = 100


@dataclass(frozen=True)
class SessionConfig:
    implication: str = "kleene-dienes"
    all_semantics: str = "implication"
    conjunction: str = "min-scalar"
    tnorm: str = "min"
    conorm: str = "max"
    threshold: float = DEFAULT_THRESHOLD
    scc_bound: int = DEFAULT_SCC_BOUND
    trace: bool = False
    format: str = "text"
    strict: bool = False

    def __post_init__(self):
        self.degrees  # validates the operator names
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must lie in (0, 1)")
        if self.scc_bound < 1:
            raise ValueError("scc bound must be positive")
        if self.format not in ("text", "machine"):
            raise ValueError("format must be text or machine")

    @property
    def degrees(self) -> DegreeConfig:
        return DegreeConfig(self.implication, self.all_semantics, self.conjunction, self.tnorm)

    def with_setting(self, key: str, value: str) -> "SessionConfig":
        """Copy with one setting changed; ``key`` uses the CLI spelling (``all-semantics``)."""
        attr = key.replace("-", "_")
        if attr not in self.__dataclass_fields__:
            raise KeyError(f"unknown setting {key!r}")
        current = getattr(self, attr)
        if isinstance(current, bool):
            if value not in ("on", "off", "true", "false"):
                raise ValueError(f"{key} takes on or off")
            parsed = value in ("on", "true")
        elif isinstance(current, int):
            parsed = int(value)
        elif isinstance(current, float):
            parsed = float(value)
        else:
            parsed = value
        return replace(self, **{attr: parsed})


@dataclass(frozen=True)
class Fact:
    literal: Literal
    certainty: Certainty
    provenance: str
    sequence: int = field(default=0, compare=False)

    @property
    def rank(self) -> int:
        if self.provenance == ASSERTED:
            return 0 if self.certainty.is_certain else 2
        return 1 if self.provenance == DEDUCED else 3

    def machine(self) -> str:
        return f"{self.literal} {self.certainty.lower:.12g} {self.certainty.upper:.12g} {self.provenance}"


@dataclass(frozen=True)
class Effect:
    """One internal assertional change sent to a reasoner."""

    action: str
    literal: Literal
    target: str
    certainty: Optional[Certainty] = None

    def __str__(self):
        if self.action == "close-role":
            body = f"{self.literal.args[0]} {self.literal.pred}"
        elif self.certainty is None or self.certainty.is_certain:
            body = str(self.literal)
        elif self.certainty.lower == self.certainty.upper:
            body = f"({self.literal} {self.certainty.lower:g})"
        else:
            body = f"({self.literal} [{self.certainty.lower:g} {self.certainty.upper:g}])"
        return f"{self.action} {body} -> {self.target}"


@dataclass(frozen=True)
class Answer:
    literal: Literal
    certainty: Certainty
    provenance: str  # or "unknown"
    text: str

    def machine(self) -> str:
        return f"{self.literal} {self.certainty.lower:.12g} {self.certainty.upper:.12g} {self.provenance}"


class FactStore:
    """Read-only projection of the knowledge base into provenance-tagged facts."""

    def __init__(self, facts):
        self._slots: dict[Literal, dict[str, Fact]] = {}
        for f in facts:
            self._slots.setdefault(f.literal, {})[f.provenance] = f

    def slots(self, literal: Literal) -> dict:
        return dict(self._slots.get(literal, {}))

    def facts(self, instance: Optional[str] = None) -> list:
        out = [f for slot in self._slots.values() for f in slot.values()]
        if instance is not None:
            out = [f for f in out if instance in f.literal.args]
        return sorted(out, key=lambda f: (str(f.literal), f.rank))

    def certain_view(self) -> set:
        return {f.literal for f in self.facts() if f.certainty.is_certain}

    def dump(self, instance: Optional[str] = None) -> str:
        return "\n".join(f.machine() for f in self.facts(instance))


def _lowercase(name: str) -> str:
    return name.lower()


def render_answer(literal: Literal, certainty: Certainty) -> str:
    x = literal.args[0]
    if literal.arity == 2:
        fact = f"related to {literal.args[1]} by {_lowercase(literal.base)}"
        if certainty.is_certain:
            return f"{x} is {'not ' if literal.negated else ''}{fact}."
        return f"{x} is likely ({certainty.lower:.6g}) {'not ' if literal.negated else ''}to be {fact}."
    c = _lowercase(literal.base)
    if certainty.is_certain:
        return f"{x} is {'not ' if literal.negated else ''}{c}."
    return f"{x} is likely ({certainty.lower:.6g}) {'not ' if literal.negated else ''}to be {c}."


# --------------------------------------------------------------------------
# Graded terminological nodes


class _EngineStore:
    """Degree store reading memberships from engine node values."""

    def __init__(self, bridge, value, index):
        self.bridge = bridge
        self.value = value
        self.index = index

    def concept_degree(self, prim, x):
        lowers = [self.value(Literal(k, (x,))).lower for k in self.bridge.concept_preds(prim)
                  if Literal(k, (x,)) in self.index.nodes]
        own = Literal(prim, (x,))
        upper = self.value(own).upper if own in self.index.nodes else 1.0
        lower = max(lowers, default=0.0)
        return Certainty(lower, max(lower, upper))

    def fillers(self, role, x):
        out = []
        for y, lits in sorted(self.index.links.get(x, {}).items()):
            per = {}
            for lit in lits:
                lo = self.value(lit).lower
                for p in self.bridge.tbox.role_primitives(lit.pred):
                    per[p] = max(per.get(p, 0.0), lo)
            if role <= per.keys():
                out.append((y, Certainty(min(per[p] for p in role), 1.0)))
        return out


class _Index:
    def __init__(self, known):
        self.nodes = known
        self.links = {}
        self.subjects = {}
        for lit in known:
            self.subjects.setdefault(lit.pred, set()).add(lit.args[0])
            if lit.arity == 2:
                self.links.setdefault(lit.args[0], {}).setdefault(lit.args[1], []).append(lit)
        for targets in self.links.values():
            for lits in targets.values():
                lits.sort()


class TerminologyBridge:
    """Engine nodes ``C(x)`` for defined concepts, graded by the fuzzy semantics.

    A node is created for each defined concept and each instance that is the
    subject of a literal on one of the concept's top-level predicates. Its
    contribution only confirms: ``[mu.lower, 1]``.
    """

    def __init__(self, tbox: TBox, config: DegreeConfig):
        self.tbox = tbox
        self.config = config
        self.invalidate()

    def invalidate(self):
        self._cpreds, self._rpreds, self._preds = {}, {}, {}
        self._index = None

    def concept_preds(self, prim):
        if prim not in self._cpreds:
            self._cpreds[prim] = sorted(k for k in self.tbox.concept_names()
                                        if self.tbox.is_primitive(k) and prim in self.tbox.normal_form(k).primitives)
        return self._cpreds[prim]

    def relation_preds(self, prim):
        if prim not in self._rpreds:
            self._rpreds[prim] = sorted(r for r in self.tbox.relation_names() if prim in self.tbox.role_primitives(r))
        return self._rpreds[prim]

    def _graded(self):
        out = []
        for name in sorted(self.tbox.defined_concepts()):
            nf = self.tbox.normal_form(name)
            if not nf.bottom and nf != TOP:
                out.append((name, nf))
        return out

    def _top_level(self, nf):
        preds = set()
        for p in nf.primitives:
            preds.update(self.concept_preds(p))
        for rc in nf.roles:
            for p in rc.role:
                preds.update(self.relation_preds(p))
        return preds

    def _all_preds(self, nf):
        preds = self._top_level(nf)
        for rc in nf.roles:
            if rc.value != TOP:
                preds |= self._all_preds(rc.value)
        return preds

    def predicate_dependencies(self) -> dict:
        return {name: self._all_preds(nf) for name, nf in self._graded()}

    def _indexed(self, known):
        if self._index is None or self._index.nodes is not known:
            self._index = _Index(known)
        return self._index

    def _deps(self, x, nf, index, out):
        for p in nf.primitives:
            for k in self.concept_preds(p):
                lit = Literal(k, (x,))
                if lit in index.nodes:
                    out.add(lit)
        for rc in nf.roles:
            rels = {r for p in rc.role for r in self.relation_preds(p)}
            for y, lits in index.links.get(x, {}).items():
                hit = [lit for lit in lits if lit.pred in rels]
                out.update(hit)
                if hit and rc.value != TOP:
                    self._deps(y, rc.value, index, out)
        return out

    def ground(self, known) -> dict:
        index = self._indexed(known)
        out = {}
        for name, nf in self._graded():
            subjects = set()
            for pred in self._top_level(nf):
                subjects |= index.subjects.get(pred, set())
            for x in sorted(subjects):
                node = Literal(name, (x,))
                out[node] = tuple(sorted(self._deps(x, nf, index, set()) - {node}))
        return out

    def evaluate(self, node, value, known) -> Certainty:
        store = _EngineStore(self, value, self._indexed(known))
        degree = mu(node.args[0], self.tbox.normal_form(node.pred), store, self.config)
        return Certainty(degree.lower, 1.0)


# --------------------------------------------------------------------------
# Knowledge base


class KnowledgeBase:
    def __init__(self, config: Optional[SessionConfig] = None):
        self.config = config or SessionConfig()
        self._fresh()

    def _fresh(self):
        cfg = self.config
        self.tbox = TBox(auto_declare=not cfg.strict)
        self.bridge = TerminologyBridge(self.tbox, cfg.degrees)
        self.engine = PlausibleEngine(cfg.tnorm, cfg.conorm, cfg.scc_bound, cfg.threshold, derived=self.bridge)
        self.asserted: dict[Literal, Certainty] = {}
        self._sequence: dict[Literal, int] = {}
        self.closed: set = set()
        self.promoted: frozenset = frozenset()
        self.deduced: frozenset = frozenset()
        self.log: list = []
        self.effects: list = []
        self.trace: list = []
        self._counter = 0
        self.store = FactStore(())

    # -- session management -----------------------------------------------

    def reset(self) -> None:
        self._fresh()

    def configure(self, config: SessionConfig) -> None:
        """Switch operators; every inferred fact is recomputed from the statement log."""
        log_ = list(self.log)
        self.config = config
        self._replay(log_)

    def _replay(self, statements):
        self._fresh()
        for stmt in statements:
            self.execute(stmt)

    def execute(self, stmt):
        """Run one statement. Returns an Answer for ``ask`` and a list of Effects otherwise.

        A failing mutation leaves the knowledge base as it was.
        """
        if isinstance(stmt, Ask):
            return self.ask(stmt.literal)
        before = list(self.log)
        try:
            effects = self._mutate(stmt)
        except (KBError, ValueError):
            self._replay(before)
            raise
        self.log.append(stmt)
        return effects

    def run(self, text: str) -> list:
        return [self.execute(s) for s in parse_program(text)]

    def _mutate(self, stmt):
        values = self.engine.values()
        if isinstance(stmt, DefConcept):
            self.tbox.define_concept(stmt.name, stmt.expr)
            effects = self._redefine()
        elif isinstance(stmt, DefRelation):
            self.tbox.define_relation(stmt.name, stmt.expr)
            effects = self._redefine()
        elif isinstance(stmt, DefRule):
            for lit in stmt.rule.antecedent + (stmt.rule.consequent,):
                self._declare(lit)
            self.engine.add_rule(stmt.rule)
            effects = self._sync()
        elif isinstance(stmt, DefDefault):
            for lit in (stmt.rule.unless, stmt.rule.then):
                self._declare(lit)
            self.engine.add_default(stmt.rule)
            effects = self._sync()
        elif isinstance(stmt, Tell):
            effects = self._tell(stmt.literal, stmt.certainty)
        elif isinstance(stmt, Forget):
            effects = self._forget(stmt.literal)
        elif isinstance(stmt, CloseRole):
            self._declare(Literal(stmt.role, (stmt.instance, stmt.instance)))
            key = (stmt.instance, stmt.role)
            effects = []
            if key not in self.closed:
                self.closed.add(key)
                effects.append(Effect("close-role", Literal(stmt.role, (stmt.instance,)), "deductive"))
            effects += self._sync()
        else:
            raise TypeError(f"not a statement: {stmt!r}")
        self.effects = effects
        self.trace = self._diff(values)
        return effects

    def _redefine(self):
        self.bridge.invalidate()
        self.engine.refresh()
        return self._sync()

    def _diff(self, before):
        after = self.engine.values()
        lines = []
        for node in sorted(set(before) | set(after)):
            old, new = before.get(node, UNKNOWN), after.get(node, UNKNOWN)
            if old != new:
                vias = [c.name for c in self.engine.contributions(node) if not c.certainty.is_vacuous]
                lines.append(f"{node} old=[{old.lower:g},{old.upper:g}] new=[{new.lower:g},{new.upper:g}] "
                             f"via={','.join(vias) or '-'}")
        return lines

    # -- assertions -------------------------------------------------------

    def _declare(self, lit: Literal):
        name = lit.base
        if lit.arity == 1:
            if self.tbox.is_relation(name):
                raise SortError(f"{name} is a relation, expected a concept")
            if not self.tbox.is_concept(name):
                if self.config.strict:
                    raise UnknownSymbol(f"undeclared concept {name}")
                self.tbox.declare_concept(name)
                self.bridge.invalidate()
        elif lit.arity == 2:
            if self.tbox.is_concept(name):
                raise SortError(f"{name} is a concept, expected a relation")
            if not self.tbox.is_relation(name):
                if self.config.strict:
                    raise UnknownSymbol(f"undeclared relation {name}")
                self.tbox.declare_relation(name)
                self.bridge.invalidate()
        else:
            raise ArityError(f"literal {lit} must have one or two arguments")

    def tell(self, literal: Literal, certainty=None) -> list:
        c = None if certainty is None else Certainty.coerce(certainty)
        return self.execute(Tell(literal, c))

    def forget(self, literal: Literal) -> list:
        return self.execute(Forget(literal))

    def close_role(self, instance: str, role: str) -> list:
        return self.execute(CloseRole(instance, role))

    def _tell(self, literal, certainty) -> list:
        self._declare(literal)
        c = CERTAIN if certainty is None else Certainty.coerce(certainty)
        previous = self.asserted.get(literal)
        effects = []
        if c.is_certain:
            effects.append(Effect("tell", literal, "deductive"))
            effects.append(Effect("tell", literal, "approximate"))
        else:
            if previous is not None and previous.is_certain:
                effects.append(Effect("forget", literal, "deductive"))
            effects.append(Effect("tell", literal, "approximate", c))
        self.asserted[literal] = c
        self._counter += 1
        self._sequence[literal] = self._counter
        return effects + self._sync()

    def _forget(self, literal) -> list:
        previous = self.asserted.pop(literal, None)
        if previous is None:
            log.warning("forget: %s was never asserted", literal)
            return []
        self._sequence.pop(literal, None)
        effects = []
        if previous.is_certain:
            effects.append(Effect("forget", literal, "deductive"))
        effects.append(Effect("forget", literal, "approximate"))
        return effects + self._sync()

    # -- synchronization ----------------------------------------------------

    def _certain_asserted(self):
        return {lit for lit, c in self.asserted.items() if c.is_certain and not lit.negated}

    def _deduce(self, certain):
        abox = CrispABox()
        for lit in certain:
            if lit.arity == 1:
                abox.concepts.add((lit.pred, lit.args[0]))
            else:
                abox.roles.add((lit.pred,) + lit.args)
        abox.closed = set(self.closed)
        found = recognize_all(self.tbox, abox)
        return frozenset(Literal(c, (x,)) for x, names in found.items() for c in names) - certain

    def _sync(self) -> list:
        """Fixpoint between recognition and propagation, always rebuilt from the assertions."""
        old_promoted = self.promoted
        asserted_certain = self._certain_asserted()
        promoted = frozenset()
        for _ in range(SYNC_LIMIT):
            certain = frozenset(asserted_certain | promoted)
            deduced = self._deduce(certain)
            inputs = dict(self.asserted)
            for lit in deduced:
                if lit not in asserted_certain:
                    inputs[lit] = CERTAIN
            self.engine.update_inputs(inputs)
            new = frozenset(
                node for node in self.engine.graph.nodes
                if node not in asserted_certain and node not in deduced
                and self.engine.derived(node, kinds=("rule", "default")).is_certain
            )
            if new == promoted:
                break
            promoted = new
        else:
            raise DivergenceGuard(f"promotion did not settle within {SYNC_LIMIT} rounds")
        self.promoted, self.deduced = promoted, deduced
        self.store = self._project()
        effects = [Effect("promote", lit, "deductive") for lit in sorted(promoted - old_promoted)]
        effects += [Effect("demote", lit, "deductive") for lit in sorted(old_promoted - promoted)]
        return effects

    def _project(self) -> FactStore:
        facts = [Fact(lit, c, ASSERTED, self._sequence.get(lit, 0)) for lit, c in self.asserted.items()]
        facts += [Fact(lit, CERTAIN, DEDUCED, self._counter) for lit in self.deduced]
        for node in self.engine.graph.nodes:
            c = self.engine.derived(node)
            if not c.is_vacuous:
                facts.append(Fact(node, c, INFERRED, self._counter))
        return FactStore(facts)

    def certain_view(self) -> frozenset:
        return frozenset(self._certain_asserted() | self.promoted | self.deduced)

    # -- queries ----------------------------------------------------------

    def ask(self, literal: Literal) -> Answer:
        candidates = list(self.store.slots(literal).values())
        for f in self.store.slots(literal.negate()).values():
            candidates.append(Fact(literal, f.certainty.complement(), f.provenance, f.sequence))
        if not candidates:
            return Answer(literal, UNKNOWN, "unknown", "unknown")
        best = min(candidates, key=lambda f: (f.rank, str(f.literal)))
        return Answer(literal, best.certainty, best.provenance, render_answer(literal, best.certainty))

    def facts(self, instance: Optional[str] = None) -> list:
        return self.store.facts(instance)

    def dump(self, instance: Optional[str] = None) -> str:
        return self.store.dump(instance)

    def taxonomy(self):
        return classify(self.tbox)

    def snapshot(self) -> tuple:
        return (
            tuple(f.machine() for f in self.facts()),
            tuple(sorted(str(x) for x in self.certain_view())),
            tuple(sorted(self.closed)),
            self.engine.snapshot(),
        )


__all__ = [
    "ASSERTED", "Answer", "DEDUCED", "Effect", "Fact", "FactStore", "INFERRED", "KnowledgeBase",
    "SessionConfig", "TerminologyBridge", "render_answer",
]
