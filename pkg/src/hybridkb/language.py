"""Reader, parser and printer for the knowledge-base DSL.

The surface syntax is parenthesized prefix notation::

    (defconcept Father (:and Male (:at-least 1 Child)))
    (defrule mercedes :if (:and (Drives ?p ?c) (Mercedes ?c)) :then (Rich ?p) :sufficiency 0.8)
    (tell ((Rich-person John) 0.8))

Comments run from ``;`` to the end of the line. Symbols are case-sensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .certainty import Certainty, Literal, is_variable
from .errors import ArityError, MalformedCertainty, ParseError, SortError
from .rules import NmjRule, PlausibleRule

# --------------------------------------------------------------------------
# Term expressions


@dataclass(frozen=True)
class Primitive:
    """A unique primitive atom, written ``(:primitive)`` inside a definition."""

    name: str


@dataclass(frozen=True)
class NamedRef:
    name: str


@dataclass(frozen=True)
class ConceptAnd:
    children: tuple


@dataclass(frozen=True)
class RoleAnd:
    children: tuple


@dataclass(frozen=True)
class All:
    role: "TermExpr"
    filler: "TermExpr"


@dataclass(frozen=True)
class AtLeast:
    n: int
    role: "TermExpr"


@dataclass(frozen=True)
class AtMost:
    n: int
    role: "TermExpr"


TermExpr = Union[Primitive, NamedRef, ConceptAnd, RoleAnd, All, AtLeast, AtMost]

# --------------------------------------------------------------------------
# Statements


@dataclass(frozen=True)
class DefConcept:
    name: str
    expr: TermExpr
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DefRelation:
    name: str
    expr: Optional[TermExpr]  # None marks a primitive relation
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DefRule:
    rule: PlausibleRule
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class DefDefault:
    rule: NmjRule
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Tell:
    literal: Literal
    certainty: Optional[Certainty] = None
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Forget:
    literal: Literal
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Ask:
    literal: Literal
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class CloseRole:
    instance: str
    role: str
    line: int = field(default=0, compare=False)


Statement = Union[DefConcept, DefRelation, DefRule, DefDefault, Tell, Forget, Ask, CloseRole]

# --------------------------------------------------------------------------
# Reader

_TOKEN = re.compile(r"(?P<ws>\s+)|(?P<comment>;[^\n]*)|(?P<open>[(\[])|(?P<close>[)\]])|(?P<atom>[^\s()\[\];]+)")
_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_INTEGER = re.compile(r"[+-]?\d+$")


@dataclass
class _Atom:
    text: str
    pos: int


@dataclass
class _List:
    items: list
    pos: int
    bracket: bool


class _Source:
    def __init__(self, text):
        self.text = text
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def where(self, pos):
        lo, hi = 0, len(self._line_starts)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self._line_starts[mid] <= pos:
                lo = mid
            else:
                hi = mid
        return lo + 1, pos - self._line_starts[lo] + 1

    def error(self, cls, message, pos):
        line, col = self.where(pos)
        return cls(message, pos, line, col)


def _read(src: _Source) -> list:
    stack = [_List([], 0, False)]
    pos = 0
    text = src.text
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        kind = m.lastgroup
        if kind == "open":
            stack.append(_List([], pos, m.group() == "["))
        elif kind == "close":
            if len(stack) == 1:
                raise src.error(ParseError, f"unexpected '{m.group()}'", pos)
            closed = stack.pop()
            if closed.bracket != (m.group() == "]"):
                raise src.error(ParseError, f"mismatched '{m.group()}'", pos)
            stack[-1].items.append(closed)
        elif kind == "atom":
            stack[-1].items.append(_Atom(m.group(), pos))
        pos = m.end()
    if len(stack) > 1:
        raise src.error(ParseError, "unterminated list", stack[-1].pos)
    return stack[0].items


# --------------------------------------------------------------------------
# Parser

_STATEMENTS = {"defconcept", "defrelation", "defrule", "defdefault", "tell", "forget", "ask", "close-role"}
_CONCEPT_FORMS = {":primitive", ":all", ":at-least", ":at-most"}


class _Parser:
    def __init__(self, src: _Source):
        self.src = src
        self.concepts = set()
        self.relations = set()

    def fail(self, message, node, cls=ParseError):
        raise self.src.error(cls, message, node.pos)

    def line(self, node):
        return self.src.where(node.pos)[0]

    # -- atoms ------------------------------------------------------------

    def symbol(self, node, what="symbol"):
        if not isinstance(node, _Atom):
            self.fail(f"expected {what}", node)
        if node.text.startswith(":") or _NUMBER.match(node.text):
            self.fail(f"expected {what}, got {node.text!r}", node)
        return node.text

    def number(self, node):
        if not isinstance(node, _Atom) or not _NUMBER.match(node.text):
            self.fail("expected a number", node)
        return float(node.text)

    def integer(self, node):
        if not isinstance(node, _Atom) or not _INTEGER.match(node.text):
            self.fail("expected a nonnegative integer", node)
        n = int(node.text)
        if n < 0:
            self.fail("expected a nonnegative integer", node)
        return n

    def certainty(self, node):
        try:
            if isinstance(node, _List):
                if not node.bracket or len(node.items) != 2:
                    self.fail("expected an interval [LOWER UPPER]", node)
                return Certainty(self.number(node.items[0]), self.number(node.items[1]))
            return Certainty.point(self.number(node))
        except MalformedCertainty as exc:
            self.fail(str(exc), node)

    def keyword(self, node):
        return node.text if isinstance(node, _Atom) and node.text.startswith(":") else None

    # -- expressions ------------------------------------------------------

    def concept(self, node, defining):
        if isinstance(node, _Atom):
            name = self.symbol(node, "concept name")
            if name in self.relations:
                self.fail(f"{name} is a relation, expected a concept", node, SortError)
            return NamedRef(name)
        if node.bracket or not node.items:
            self.fail("expected a concept expression", node)
        head = self.keyword(node.items[0])
        args = node.items[1:]
        if head == ":primitive":
            if args:
                self.fail("(:primitive) takes no operands", node, ArityError)
            return Primitive(defining)
        if head == ":and":
            if not args:
                self.fail(":and needs at least one operand", node, ArityError)
            children = tuple(self.concept(a, defining) for a in args)
            return children[0] if len(children) == 1 else ConceptAnd(children)
        if head == ":all":
            if len(args) != 2:
                self.fail(":all takes a relation and a concept", node, ArityError)
            return All(self.relation(args[0]), self.concept(args[1], defining))
        if head in (":at-least", ":at-most"):
            if len(args) != 2:
                self.fail(f"{head} takes a number and a relation", node, ArityError)
            cls = AtLeast if head == ":at-least" else AtMost
            return cls(self.integer(args[0]), self.relation(args[1]))
        self.fail(f"unknown concept form {node.items[0].text if isinstance(node.items[0], _Atom) else '(...)'}",
                  node)

    def relation(self, node):
        if isinstance(node, _Atom):
            name = self.symbol(node, "relation name")
            if name in self.concepts:
                self.fail(f"{name} is a concept, expected a relation", node, SortError)
            return NamedRef(name)
        if node.bracket or not node.items:
            self.fail("expected a relation expression", node)
        head = self.keyword(node.items[0])
        if head == ":and":
            args = node.items[1:]
            if not args:
                self.fail(":and needs at least one operand", node, ArityError)
            children = tuple(self.relation(a) for a in args)
            return children[0] if len(children) == 1 else RoleAnd(children)
        if head in _CONCEPT_FORMS:
            self.fail(f"{head} forms a concept, expected a relation", node, SortError)
        self.fail("expected a relation expression", node)

    def literal(self, node, allow_variables=False):
        if not isinstance(node, _List) or node.bracket:
            self.fail("expected a literal", node)
        if len(node.items) not in (2, 3):
            self.fail("a literal has one or two instance arguments", node, ArityError)
        pred = self.symbol(node.items[0], "predicate")
        args = tuple(self.symbol(a, "instance") for a in node.items[1:])
        base = pred.lstrip("~")
        if len(args) == 1 and base in self.relations:
            self.fail(f"relation {base} used with one argument", node, SortError)
        if len(args) == 2 and base in self.concepts:
            self.fail(f"concept {base} used with two arguments", node, SortError)
        if not allow_variables and any(is_variable(a) for a in args):
            self.fail("variables are only allowed inside rules", node)
        return Literal(pred, args)

    def conjunction(self, node):
        if isinstance(node, _List) and node.items and self.keyword(node.items[0]) == ":and":
            if len(node.items) < 2:
                self.fail(":and needs at least one literal", node, ArityError)
            return tuple(self.literal(n, True) for n in node.items[1:])
        return (self.literal(node, True),)

    # -- statements -------------------------------------------------------

    def statement(self, node):
        if not isinstance(node, _List) or node.bracket or not node.items:
            self.fail("expected a statement", node)
        head = node.items[0]
        if not isinstance(head, _Atom):
            self.fail("expected a statement keyword", node)
        if head.text not in _STATEMENTS:
            self.fail(f"unknown statement {head.text!r}", head)
        handler = getattr(self, "_" + head.text.replace("-", "_"))
        return handler(node, node.items[1:], self.line(node))

    def _defconcept(self, node, args, line):
        if len(args) != 2:
            self.fail("defconcept takes a name and an expression", node, ArityError)
        name = self.symbol(args[0], "concept name")
        if name in self.relations:
            self.fail(f"{name} is already a relation", args[0], SortError)
        if self.keyword(args[1]) == ":primitive":
            expr = Primitive(name)
        else:
            expr = self.concept(args[1], name)
        self.concepts.add(name)
        return DefConcept(name, expr, line)

    def _defrelation(self, node, args, line):
        if len(args) != 2:
            self.fail("defrelation takes a name and an expression", node, ArityError)
        name = self.symbol(args[0], "relation name")
        if name in self.concepts:
            self.fail(f"{name} is already a concept", args[0], SortError)
        body = args[1]
        if self.keyword(body) == ":primitive" or (
            isinstance(body, _List) and len(body.items) == 1 and self.keyword(body.items[0]) == ":primitive"
        ):
            expr = None
        else:
            expr = self.relation(body)
        self.relations.add(name)
        return DefRelation(name, expr, line)

    def _options(self, node, args, allowed):
        """Split ``:key value...`` runs; each key takes the arity given in ``allowed``."""
        out = {}
        i = 0
        while i < len(args):
            key = self.keyword(args[i])
            if key not in allowed:
                self.fail(f"unexpected {args[i].text if isinstance(args[i], _Atom) else 'form'}", args[i])
            if key in out:
                self.fail(f"duplicate {key}", args[i])
            width = allowed[key]
            values = args[i + 1:i + 1 + width]
            if len(values) != width or any(self.keyword(v) for v in values):
                self.fail(f"{key} expects {width} operand(s)", args[i], ArityError)
            out[key] = values
            i += 1 + width
        return out

    def _defrule(self, node, args, line):
        if not args:
            self.fail("defrule needs a name", node, ArityError)
        name = self.symbol(args[0], "rule name")
        opts = self._options(node, args[1:], {":if": 1, ":then": 1, ":sufficiency": 1,
                                              ":prob-given": 1, ":prob-given-not": 1})
        for key in (":if", ":then"):
            if key not in opts:
                self.fail(f"defrule needs {key}", node, ArityError)
        antecedent = self.conjunction(opts[":if"][0])
        consequent = self.literal(opts[":then"][0], True)
        probabilistic = {":prob-given", ":prob-given-not"} & opts.keys()
        if ":sufficiency" in opts:
            if probabilistic:
                self.fail("a rule is either possibilistic or probabilistic", node)
            s_node = opts[":sufficiency"][0]
            if isinstance(s_node, _List):
                sufficiency = self.certainty(s_node)
            else:
                s = self.number(s_node)
                if not 0 <= s <= 1:
                    self.fail("sufficiency must lie in [0, 1]", s_node)
                sufficiency = Certainty(s, 1.0)
            rule = PlausibleRule(name, antecedent, consequent, sufficiency=sufficiency)
        elif len(probabilistic) == 2:
            for key in probabilistic:
                if not isinstance(opts[key][0], _List):
                    self.fail(f"{key} expects an interval", opts[key][0])
            rule = PlausibleRule(name, antecedent, consequent,
                                 given=self.certainty(opts[":prob-given"][0]),
                                 given_not=self.certainty(opts[":prob-given-not"][0]))
        else:
            self.fail("defrule needs :sufficiency or both :prob-given and :prob-given-not", node, ArityError)
        try:
            rule.validate()
        except ValueError as exc:
            self.fail(str(exc), node)
        return DefRule(rule, line)

    def _defdefault(self, node, args, line):
        if not args:
            self.fail("defdefault needs a name", node, ArityError)
        name = self.symbol(args[0], "rule name")
        opts = self._options(node, args[1:], {":unless": 1, ":threshold": 1, ":then": 2})
        for key in (":unless", ":then"):
            if key not in opts:
                self.fail(f"defdefault needs {key}", node, ArityError)
        threshold = None
        if ":threshold" in opts:
            threshold = self.number(opts[":threshold"][0])
            if not 0 < threshold < 1:
                self.fail("threshold must lie strictly between 0 and 1", opts[":threshold"][0])
        then_node, degree_node = opts[":then"]
        degree = self.number(degree_node)
        if not 0 <= degree <= 1:
            self.fail("default degree must lie in [0, 1]", degree_node)
        rule = NmjRule(name, self.literal(opts[":unless"][0], True), threshold,
                       self.literal(then_node, True), degree)
        try:
            rule.validate()
        except ValueError as exc:
            self.fail(str(exc), node)
        return DefDefault(rule, line)

    def _tell(self, node, args, line):
        if len(args) != 1:
            self.fail("tell takes one literal", node, ArityError)
        arg = args[0]
        if isinstance(arg, _List) and not arg.bracket and arg.items and isinstance(arg.items[0], _List):
            if len(arg.items) != 2:
                self.fail("expected (literal certainty)", arg, ArityError)
            return Tell(self.literal(arg.items[0]), self.certainty(arg.items[1]), line)
        return Tell(self.literal(arg), None, line)

    def _forget(self, node, args, line):
        if len(args) != 1:
            self.fail("forget takes one literal", node, ArityError)
        return Forget(self.literal(args[0]), line)

    def _ask(self, node, args, line):
        if len(args) != 1:
            self.fail("ask takes one literal", node, ArityError)
        return Ask(self.literal(args[0]), line)

    def _close_role(self, node, args, line):
        if len(args) != 2:
            self.fail("close-role takes an instance and a relation", node, ArityError)
        role = self.symbol(args[1], "relation name")
        if role in self.concepts:
            self.fail(f"{role} is a concept, expected a relation", args[1], SortError)
        return CloseRole(self.symbol(args[0], "instance"), role, line)


def parse_program(text: str) -> list:
    """Parse DSL text into a list of statements, in textual order."""
    src = _Source(text)
    parser = _Parser(src)
    return [parser.statement(node) for node in _read(src)]


def parse_expression(text: str, sort: str = "concept") -> TermExpr:
    """Parse a single concept (or relation) expression."""
    src = _Source(text)
    nodes = _read(src)
    if len(nodes) != 1:
        raise ParseError("expected exactly one expression")
    parser = _Parser(src)
    if sort == "relation":
        return parser.relation(nodes[0])
    return parser.concept(nodes[0], "anonymous")


def parse_literal(text: str) -> Literal:
    src = _Source(text)
    nodes = _read(src)
    if len(nodes) != 1:
        raise ParseError("expected exactly one literal")
    return _Parser(src).literal(nodes[0])


# --------------------------------------------------------------------------
# Printer


def _num(x: float) -> str:
    return repr(float(x))


def format_certainty(c: Certainty) -> str:
    if c.lower == c.upper:
        return _num(c.lower)
    return f"[{_num(c.lower)} {_num(c.upper)}]"


def format_expr(expr: TermExpr) -> str:
    if isinstance(expr, NamedRef):
        return expr.name
    if isinstance(expr, Primitive):
        return "(:primitive)"
    if isinstance(expr, (ConceptAnd, RoleAnd)):
        return "(:and " + " ".join(format_expr(c) for c in expr.children) + ")"
    if isinstance(expr, All):
        return f"(:all {format_expr(expr.role)} {format_expr(expr.filler)})"
    if isinstance(expr, AtLeast):
        return f"(:at-least {expr.n} {format_expr(expr.role)})"
    if isinstance(expr, AtMost):
        return f"(:at-most {expr.n} {format_expr(expr.role)})"
    raise TypeError(f"not a term expression: {expr!r}")


def format_statement(stmt: Statement) -> str:
    if isinstance(stmt, DefConcept):
        return f"(defconcept {stmt.name} {format_expr(stmt.expr)})"
    if isinstance(stmt, DefRelation):
        body = ":primitive" if stmt.expr is None else format_expr(stmt.expr)
        return f"(defrelation {stmt.name} {body})"
    if isinstance(stmt, DefRule):
        r = stmt.rule
        cond = str(r.antecedent[0]) if len(r.antecedent) == 1 else \
            "(:and " + " ".join(str(a) for a in r.antecedent) + ")"
        if r.probabilistic:
            tail = (f":prob-given [{_num(r.given.lower)} {_num(r.given.upper)}] "
                    f":prob-given-not [{_num(r.given_not.lower)} {_num(r.given_not.upper)}]")
        else:
            tail = f":sufficiency [{_num(r.sufficiency.lower)} {_num(r.sufficiency.upper)}]"
        return f"(defrule {r.name} :if {cond} :then {r.consequent} {tail})"
    if isinstance(stmt, DefDefault):
        r = stmt.rule
        thr = "" if r.threshold is None else f" :threshold {_num(r.threshold)}"
        return f"(defdefault {r.name} :unless {r.unless}{thr} :then {r.then} {_num(r.degree)})"
    if isinstance(stmt, Tell):
        if stmt.certainty is None:
            return f"(tell {stmt.literal})"
        return f"(tell ({stmt.literal} {format_certainty(stmt.certainty)}))"
    if isinstance(stmt, Forget):
        return f"(forget {stmt.literal})"
    if isinstance(stmt, Ask):
        return f"(ask {stmt.literal})"
    if isinstance(stmt, CloseRole):
        return f"(close-role {stmt.instance} {stmt.role})"
    raise TypeError(f"not a statement: {stmt!r}")


def format_program(statements) -> str:
    return "\n".join(format_statement(s) for s in statements)
