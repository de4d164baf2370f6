"""Hybrid knowledge base: a terminological classifier joined to a plausible rule engine.

The deductive side classifies concept definitions and recognizes instances
from certain facts. The approximate side propagates interval certainties
through weighted rules and defaults, and grades concept membership when the
facts themselves carry degrees.
"""

from .certainty import CERTAIN, UNKNOWN, Certainty, Literal
from .classifier import CrispABox, Taxonomy, TBox, classify, recognize, recognize_all, subsumes
from .errors import (
    ArityError, CyclicDefinition, CyclicMonotonicRules, DivergenceGuard, IncoherentConcept, KBError,
    MalformedCertainty, ParseError, SccTooLarge, SortError, UnknownName, UnknownSymbol,
)
from .fuzzy import (
    DegreeConfig, DegreeStore, implication, interval_conjunction, mu, mu_at_least, mu_at_most,
    tconorm, tnorm,
)
from .kb import Answer, Effect, Fact, FactStore, KnowledgeBase, SessionConfig
from .language import format_program, parse_expression, parse_literal, parse_program
from .normal import BOTTOM, TOP, NormalForm, conjoin, denormalize, normalize
from .plausible import PlausibleEngine, condense, evaluate_scc, propagate, propagate_probability
from .rules import NmjRule, PlausibleRule

__version__ = "0.1.0"

__all__ = [
    "Answer", "ArityError", "BOTTOM", "CERTAIN", "Certainty", "CrispABox", "CyclicDefinition",
    "CyclicMonotonicRules", "DegreeConfig", "DegreeStore", "DivergenceGuard", "Effect", "Fact", "FactStore",
    "IncoherentConcept", "KBError", "KnowledgeBase", "Literal", "MalformedCertainty", "NmjRule", "NormalForm",
    "ParseError", "PlausibleEngine", "PlausibleRule", "SccTooLarge", "SessionConfig", "SortError", "TBox",
    "TOP", "Taxonomy", "UNKNOWN", "UnknownName", "UnknownSymbol", "classify", "condense", "conjoin",
    "denormalize", "evaluate_scc", "format_program", "implication", "interval_conjunction", "mu",
    "mu_at_least", "mu_at_most", "normalize", "parse_expression", "parse_literal", "parse_program",
    "propagate", "propagate_probability", "recognize", "recognize_all", "subsumes", "tconorm", "tnorm",
]
