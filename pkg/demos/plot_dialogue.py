"""
The two reasoners in one session
================================

A short dialogue about John and his car. A rule gives a plausible answer,
a certain deduction overrides it, and retracting the supporting fact
restores the plausible answer.
"""

import io
from pathlib import Path

from hybridkb import KnowledgeBase, Literal, SessionConfig
from hybridkb.cli import run_batch

HERE = Path(__file__).resolve().parent

###############################################################################
# Run the knowledge file the same way the command line does.

out, err = io.StringIO(), io.StringIO()
run_batch([str(HERE / "kb" / "mercedes.kb")], [], SessionConfig(trace=True), out, err)
print(out.getvalue())

###############################################################################
# The trace on stderr lists which reasoner each change was sent to, and
# every engine node whose interval moved.

print("\n".join(err.getvalue().splitlines()[:12]))

###############################################################################
# The same session through the library. ``facts`` shows every slot kept
# for John, not just the winning answer.

kb = KnowledgeBase()
kb.run((HERE / "kb" / "mercedes.kb").read_text())
for fact in kb.facts("John"):
    print(fact.machine())

###############################################################################
# Downgrading a certain fact withdraws it from the deductive side and
# hands the degree to the plausible side.

for effect in kb.tell(Literal.of("Mansion", "house-1"), 1.0):
    print(effect)
for effect in kb.tell(Literal.of("Mansion", "house-1"), 0.6):
    print(effect)
print(kb.ask(Literal.of("Rich", "John")).text)
