"""
Plausible rules, cycles and defaults
====================================

The approximate reasoner propagates certainty intervals through weighted
rules. Cycles are handled per strongly connected component, and defaults
fire only while their exception stays below a threshold.
"""

from hybridkb import Certainty, Literal, NmjRule, PlausibleEngine, PlausibleRule, propagate_probability

L = Literal.of

###############################################################################
# A single rule: the antecedent certainty is combined with the rule's
# sufficiency and detached as a lower bound on the consequent.

engine = PlausibleEngine(tnorm_family="product")
engine.add_rule(PlausibleRule("wet-grass", (L("Rain", "today"), L("Outside", "lawn")),
                              L("Wet", "lawn"), Certainty(0.9, 1.0)))
engine.set_input(L("Rain", "today"), Certainty(0.8, 1.0))
engine.set_input(L("Outside", "lawn"), 1.0)
print("Wet(lawn) =", engine.value(L("Wet", "lawn")))

###############################################################################
# Two independent confirmations combine by the conorm of their lower bounds.

engine.add_rule(PlausibleRule("sprinkler", (L("Sprinkler", "lawn"),), L("Wet", "lawn"), Certainty(0.7, 1.0)))
engine.set_input(L("Sprinkler", "lawn"), 1.0)
print("Wet(lawn) with sprinkler =", engine.value(L("Wet", "lawn")))

###############################################################################
# The classic bird example. Tweety flies by default unless it is known,
# with enough certainty, to be abnormal.

birds = PlausibleEngine()
birds.add_default(NmjRule("birds-fly", L("Abnormal", "tweety"), 0.3, L("Flies", "tweety"), 0.9))
print("before:", birds.value(L("Flies", "tweety")))
birds.add_rule(PlausibleRule("penguins", (L("Penguin", "tweety"),), L("Abnormal", "tweety"), Certainty(0.95, 1.0)))
birds.set_input(L("Penguin", "tweety"), 1.0)
print("penguin:", birds.value(L("Flies", "tweety")))

###############################################################################
# Retracting the penguin evidence recomputes only the affected component,
# and the default fires again.

birds.retract(L("Penguin", "tweety"))
print("retracted:", birds.value(L("Flies", "tweety")))
for line in birds.trace:
    print("  ", line)

###############################################################################
# Two defaults that block each other form one component. Among the
# consistent, maximal choices the one with the larger total support wins.

rivals = PlausibleEngine()
rivals.add_default(NmjRule("quaker", L("Hawk", "nixon"), None, L("Pacifist", "nixon"), 0.7))
rivals.add_default(NmjRule("republican", L("Pacifist", "nixon"), None, L("Hawk", "nixon"), 0.6))
print("Pacifist:", rivals.value(L("Pacifist", "nixon")), "Hawk:", rivals.value(L("Hawk", "nixon")))

###############################################################################
# Probabilistic propagation keeps the two conditional bounds apart and
# returns the extreme values of the total probability over all three
# intervals.

print(propagate_probability(Certainty(0.6, 0.8), Certainty(0.9, 1.0), Certainty(0.1, 0.2)))
