"""Exception types shared across the package."""


class ParseError(ValueError):
    """Malformed input; ``context`` names the file or field at fault."""

    def __init__(self, message, context=None):
        super().__init__(message if context is None else f"{context}: {message}")
        self.reason = message
        self.context = context


class PreconditionError(ValueError):
    pass


class CompositionError(ValueError):
    """Source and target of two morphisms do not match."""


class LiftingError(RuntimeError):
    """A chain-map lifting system had no solution (never expected)."""


class BoundaryError(KeyError):
    """A value outside the finite window was needed."""


class VerificationError(AssertionError):
    """A computed table disagrees with its closed form."""
