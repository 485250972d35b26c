"""Exception hierarchy shared by every module."""


class DispCatError(Exception):
    """Base class for all errors raised by dispcat."""


class MalformedInput(DispCatError):
    pass


class UnknownObject(DispCatError):
    pass


class UnknownMorphism(DispCatError):
    pass


class ResourceLimit(DispCatError):
    pass


class BaseMismatch(DispCatError):
    pass


class NotAMonad(DispCatError):
    pass


class BaseNotIso(DispCatError):
    pass


class BaseNotUnivalent(DispCatError):
    pass


class NotDiscrete(DispCatError):
    pass


class NotLimiting(DispCatError):
    pass


class InvalidWitness(DispCatError):
    pass


class NotUnivalentDisplay(DispCatError):
    pass


class NotClosed(DispCatError):
    pass


class CwALawFailure(DispCatError):
    pass


class ParseError(DispCatError):
    """Syntax or semantic error in a DSL source, with a location."""

    def __init__(self, message, span=None):
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class DuplicateName(ParseError):
    pass


class UnresolvedReference(ParseError):
    pass


class UnknownCommand(DispCatError):
    pass


class UnknownTarget(DispCatError):
    pass


class IncompleteTable(ParseError):
    """A required table entry (composite, image, action) is missing."""
