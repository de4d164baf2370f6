import random

import pytest
from hypothesis import given, settings, strategies as st

from hybridkb import Certainty, Literal
from hybridkb.errors import ArityError, ParseError, SortError
from hybridkb.language import (
    All, AtLeast, Ask, CloseRole, ConceptAnd, DefConcept, DefDefault, DefRelation, DefRule, Forget,
    NamedRef, Primitive, RoleAnd, Tell, format_expr, format_program, parse_expression, parse_literal,
    parse_program,
)

from oracles import random_concept


def test_defconcept_with_number_restriction():
    [stmt] = parse_program("(defconcept Father (:and Male (:at-least 1 Child)))")
    assert stmt == DefConcept("Father", ConceptAnd((NamedRef("Male"), AtLeast(1, NamedRef("Child")))))


def test_degreed_tell():
    [stmt] = parse_program("(tell ((Rich-person John) 0.8))")
    assert stmt == Tell(Literal.of("Rich-person", "John"), Certainty(0.8, 0.8))


def test_interval_tell_and_plain_forms():
    stmts = parse_program("""
        ; comment line
        (tell ((Child John Philip) [0.7 0.9]))   ; trailing comment
        (forget (Live-in John house-1))
        (ask (Rich John))
        (close-role John Live-in)
    """)
    assert stmts == [
        Tell(Literal.of("Child", "John", "Philip"), Certainty(0.7, 0.9)),
        Forget(Literal.of("Live-in", "John", "house-1")),
        Ask(Literal.of("Rich", "John")),
        CloseRole("John", "Live-in"),
    ]


def test_empty_program():
    assert parse_program("") == []
    assert parse_program("  ; only a comment\n") == []


def test_primitive_markers():
    a, b, c = parse_program("(defconcept Person (:primitive)) (defconcept Male :primitive)"
                            " (defconcept Woman (:and (:primitive) Person))")
    assert a.expr == Primitive("Person") and b.expr == Primitive("Male")
    assert c.expr == ConceptAnd((Primitive("Woman"), NamedRef("Person")))
    [r] = parse_program("(defrelation Child :primitive)")
    assert r == DefRelation("Child", None)
    [r] = parse_program("(defrelation Son (:and Child Male-link))")
    assert r.expr == RoleAnd((NamedRef("Child"), NamedRef("Male-link")))


def test_single_child_and_collapses():
    assert parse_expression("(:and A)") == NamedRef("A")


def test_rules():
    [r] = parse_program("(defrule m :if (:and (Drives ?x ?c) (Mercedes ?c)) :then (Rich ?x) :sufficiency 0.8)")
    assert isinstance(r, DefRule)
    assert r.rule.antecedent == (Literal.of("Drives", "?x", "?c"), Literal.of("Mercedes", "?c"))
    assert r.rule.sufficiency == Certainty(0.8, 1.0)
    [p] = parse_program("(defrule p :if (A x) :then (B x) :prob-given [0.9 1] :prob-given-not [0.1 0.2])")
    assert p.rule.probabilistic and p.rule.given_not == Certainty(0.1, 0.2)
    [d] = parse_program("(defdefault d :unless (Abnormal ?x) :threshold 0.2 :then (Flies ?x) 0.9)")
    assert isinstance(d, DefDefault) and d.rule.threshold == 0.2 and d.rule.degree == 0.9


@pytest.mark.parametrize("text, line", [
    ("(tell (A x))\n\n(tell (A x)", 3),
    ("(tell (A x))\n)", 2),
    ("(defconcept X (:and A [1 2]))", 1),
])
def test_syntax_errors_report_line(text, line):
    with pytest.raises(ParseError) as info:
        parse_program(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize("text, exc", [
    ("(defconcept X (:all R))", ArityError),
    ("(defconcept X (:at-least 1))", ArityError),
    ("(tell (A x y z))", ArityError),
    ("(defrelation R :primitive) (defconcept X (:and R A))", SortError),
    ("(defconcept A :primitive) (defconcept X (:all A B))", SortError),
    ("(defconcept A :primitive) (tell (A x y))", SortError),
    ("(defconcept X (:at-least -1 R))", ParseError),
    ("(defconcept X (:at-least 1.5 R))", ParseError),
    ("(tell ((A x) 1.2))", ParseError),
    ("(tell ((A x) [0.8 0.2]))", ParseError),
    ("(tell (A ?x))", ParseError),
    ("(defrule r :if (A ?x) :then (B ?y) :sufficiency 0.5)", ParseError),
    ("(defdefault d :unless (A ?x) :threshold 1 :then (B ?x) 0.5)", ParseError),
    ("(frobnicate x)", ParseError),
    ("(options a b)", ParseError),
])
def test_malformed(text, exc):
    with pytest.raises(exc):
        parse_program(text)


def test_parse_literal():
    assert parse_literal("(Child John Philip)") == Literal.of("Child", "John", "Philip")


ROUND_TRIP = """
(defrelation Child :primitive)
(defrelation Son (:and Child Male-link))
(defconcept Male (:primitive))
(defconcept Father (:and Male (:at-least 1 Child)))
(defconcept Successful-Father (:and Father (:all Child College-Graduate)))
(defconcept Few (:at-most 2 (:and Child Son)))
(defrule m :if (:and (Drives ?x ?c) (Mercedes ?c)) :then (Rich ?x) :sufficiency [0.8 0.95])
(defrule n :if (Rich ?x) :then (~Poor ?x) :sufficiency 0.9)
(defrule p :if (A x) :then (B x) :prob-given [0.9 1] :prob-given-not [0.1 0.2])
(defdefault d :unless (Abnormal ?x) :threshold 0.3 :then (Flies ?x) 0.75)
(defdefault e :unless (Abnormal ?x) :then (Flies ?x) 0.5)
(tell (Male John))
(tell ((Child John Philip) 0.8))
(tell ((Child John Angela) [0.2 0.4]))
(forget (Male John))
(ask (Successful-Father John))
(close-role John Child)
"""


def test_round_trip_fixed_program():
    stmts = parse_program(ROUND_TRIP)
    assert parse_program(format_program(stmts)) == stmts


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random_expressions(seed):
    rng = random.Random(seed)
    expr = random_concept(rng, rng.randint(1, 4), ["A", "B", "C"], ["R", "S"], max_n=3)
    text = f"(defconcept X {format_expr(expr)})"
    [stmt] = parse_program(text)
    assert stmt.expr == expr
    assert parse_program(format_program([stmt])) == [stmt]


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1))
def test_round_trip_certainties(a, b):
    lo, hi = min(a, b), max(a, b)
    stmts = [Tell(Literal.of("A", "x"), Certainty(lo, hi)), Tell(Literal.of("R", "x", "y"), Certainty(lo, lo))]
    assert parse_program(format_program(stmts)) == stmts


def test_all_form_fields():
    e = parse_expression("(:all (:and R S) (:and A (:at-most 0 R)))")
    assert isinstance(e, All) and isinstance(e.role, RoleAnd)
