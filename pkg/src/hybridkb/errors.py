"""Exception hierarchy shared by every layer of the knowledge base."""


class KBError(Exception):
    """Base class for all knowledge-base errors."""


class ParseError(KBError, ValueError):
    """Malformed DSL input.

    ``offset`` is the character offset into the source text; ``line`` and
    ``column`` are 1-based.
    """

    def __init__(self, message, offset=0, line=1, column=1):
        self.message = message
        self.offset = offset
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class ArityError(ParseError):
    """A form received the wrong number of operands."""


class SortError(ParseError):
    """A concept expression appeared where a relation was expected, or vice versa."""


class UnknownName(KBError, KeyError):
    def __str__(self):
        return f"unknown name: {self.args[0]}"


class UnknownSymbol(KBError):
    pass


class CyclicDefinition(KBError):
    pass


class IncoherentConcept(KBError):
    pass


class MalformedCertainty(KBError, ValueError):
    pass


class CyclicMonotonicRules(KBError):
    pass


class SccTooLarge(KBError):
    pass


class DivergenceGuard(KBError):
    """Promotion/demotion between the two reasoners failed to settle."""
