"""Exception hierarchy shared by every module."""

from __future__ import annotations


class FinTriposError(Exception):
    """Base class for all errors raised by fintripos."""


class CompositionError(FinTriposError):
    pass


class ConeError(FinTriposError):
    pass


class CarrierMismatch(FinTriposError):
    pass


class NotAPoset(FinTriposError):
    pass


class NotALattice(FinTriposError):
    pass


class NotDistributive(FinTriposError):
    pass


class NotInStructure(FinTriposError):
    """An element was looked up in a set, poset or frame that lacks it."""


class UnsupportedInMode(FinTriposError):
    pass


class NoDecomposition(FinTriposError):
    pass


class NotAPer(FinTriposError):
    pass


class NotCompatible(FinTriposError):
    pass


class IncompatiblePredicate(FinTriposError):
    pass


class EndpointMismatch(FinTriposError):
    pass


class NotAFunctionalRelation(FinTriposError):
    pass


class NotMeetPreserving(FinTriposError):
    pass


class BudgetExceeded(FinTriposError):
    """A search space exceeds the configured budget.

    ``estimate`` carries the number of candidates the operation would visit.
    """

    def __init__(self, what: str, estimate: int, budget: int):
        super().__init__(f"{what}: {estimate} candidates exceeds budget {budget}")
        self.estimate = estimate
        self.budget = budget


class LiftCheckFailed(FinTriposError, AssertionError):
    pass


class LangError(FinTriposError):
    """Syntax or typing error in the internal language; ``pos`` is a 0-based offset."""

    kind = "lang-error"

    def __init__(self, message: str, pos: int = -1, text: str | None = None):
        self.pos = pos
        self.text = text
        where = f" at position {pos}" if pos >= 0 else ""
        super().__init__(f"{self.kind}: {message}{where}")


class LexError(LangError):
    kind = "lex-error"


class ParseError(LangError):
    kind = "parse-error"


class UnknownSymbol(LangError):
    kind = "unknown-symbol"


class SortMismatch(LangError):
    kind = "sort-mismatch"


class UnboundVariable(LangError):
    kind = "unbound-variable"


class NonRegularConnective(LangError):
    kind = "non-regular-connective"


class LoadError(FinTriposError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(loc + message)


class MalformedInstance(FinTriposError):
    """A rule instance lacks a metavariable or violates a side condition."""
