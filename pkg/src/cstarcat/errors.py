"""Exception types shared across the package."""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(EngineError):
    """Malformed or out-of-contract input data."""


class CompositionMismatch(EngineError):
    """Attempt to compose morphisms whose objects do not line up."""


class ClosureViolation(EngineError):
    """A computed morphism fell outside the hom-space it must live in."""


class NotInvertible(EngineError):
    """An operation required an invertible morphism and did not get one."""


class ParseError(EngineError):
    """A serialized file could not be decoded."""
