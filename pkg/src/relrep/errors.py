"""Exception hierarchy shared by all relrep modules."""


class RelrepError(Exception):
    """Base class for every error raised by relrep."""


class MissingTable(RelrepError):
    def __init__(self, symbol):
        super().__init__(f"signature demands a table for {symbol!r} but the algebra has none")
        self.symbol = symbol


class Unavailable(RelrepError):
    """A derived notion cannot be computed from what the algebra provides."""


class AlgebraError(RelrepError):
    """Malformed algebra data (shapes, indices, names)."""


class BaseMismatch(RelrepError):
    def __init__(self, m1, m2):
        super().__init__(f"relations over different bases ({m1} vs {m2})")


class UniverseViolation(RelrepError):
    """The relation to complement is not contained in the universe."""


class CapExceeded(RelrepError):
    def __init__(self, cap, what="element count"):
        super().__init__(f"{what} exceeded cap {cap}")
        self.cap = cap


class RepresentationError(RelrepError):
    """Malformed representation or a transformation precondition that is not a named case."""


class NotCompositionPreserving(RepresentationError):
    pass


class MissingTop(RepresentationError):
    pass


class NotIdempotent(RepresentationError):
    pass


class NoDistinction(RepresentationError):
    pass


class WrongSemantics(RelrepError):
    pass


class PreconditionFailed(RelrepError):
    def __init__(self, hypothesis, detail=""):
        msg = f"precondition failed: {hypothesis}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.hypothesis = hypothesis
        self.detail = detail


class PartialGroupError(RelrepError):
    pass


class ParseError(RelrepError):
    """Input file problem; `where` names the JSON field or line/column."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where
