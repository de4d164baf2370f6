"""
Classifying a small family terminology
======================================

Concept definitions are parsed, normalized and placed in a subsumption
hierarchy. Instances are then recognized from certain facts, and graded
when some facts only hold to a degree.
"""

from hybridkb import KnowledgeBase, Literal, SessionConfig

###############################################################################
# Definitions go in as ordinary statements. Names never declared are
# created as primitives on first use.

kb = KnowledgeBase()
kb.run("""
(defconcept Person (:primitive))
(defconcept Male (:and Person (:primitive)))
(defconcept Parent (:and Person (:at-least 1 Child)))
(defconcept Father (:and Male Parent))
(defconcept Successful-Father (:and Father (:all Child College-Graduate)))
(defconcept Busy-Father (:and Father (:at-least 3 Child)))
""")

###############################################################################
# The classifier computes every subsumption pair and keeps only the
# direct edges. Father sits under both Male and Parent.

print(kb.taxonomy().render_tree())

###############################################################################
# Recognition from certain facts. Each answer also reports where it came
# from. Before the role is closed, the value restriction on Child is only
# graded from the fillers on record, so the answer is inferred. Closing
# the role lets the classifier deduce it.

kb.run("""
(tell (Male John)) (tell (Child John Philip)) (tell (Child John Angela))
(tell (College-Graduate Philip)) (tell (College-Graduate Angela))
""")
for name in ("Parent", "Father", "Successful-Father"):
    answer = kb.ask(Literal.of(name, "John"))
    print(answer.text, answer.provenance)

kb.run("(close-role John Child)")
answer = kb.ask(Literal.of("Successful-Father", "John"))
print(answer.text, answer.provenance)

###############################################################################
# Degrees. If Philip is a graduate only to degree 0.7, membership in
# Successful-Father becomes graded. The value depends on the implication
# used for the universal restriction.

for implication in ("kleene-dienes", "goedel", "lukasiewicz", "goguen"):
    kb = KnowledgeBase(SessionConfig(implication=implication))
    kb.run("""
    (defconcept Successful-Father (:and Male (:at-least 1 Child) (:all Child College-Graduate)))
    (tell (Male John)) (tell ((Child John Philip) 0.9)) (tell (Child John Angela))
    (tell ((College-Graduate Philip) 0.7)) (tell (College-Graduate Angela))
    """)
    answer = kb.ask(Literal.of("Successful-Father", "John"))
    print(f"{implication:>14}: {answer.certainty}")
