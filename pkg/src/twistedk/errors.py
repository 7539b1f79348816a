"""Exception types shared across the package."""


class TwistedKError(Exception):
    """Base class for all library errors."""


class ValidationError(TwistedKError):
    """Input data violates a structural axiom.

    ``witness`` holds the first offending tuple (e.g. a triple of group
    elements) when one exists.
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class NumericalError(TwistedKError):
    """A numeric computation left its domain of reliability."""


class ResolutionError(TwistedKError):
    """A cross-reference in a problem file does not resolve."""
