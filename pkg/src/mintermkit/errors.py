"""Exception types raised across the package."""


class MintermError(Exception):
    """Base class for package errors."""


class MalformedInputError(MintermError, ValueError):
    """A set or family file does not fit the declared ground set."""


class CapacityError(MintermError):
    """An exact computation would exceed its configured size limit."""


class UndefinedThresholdError(MintermError, ValueError):
    """Threshold quantities are undefined for trivial families."""


class DomainError(MintermError, ValueError):
    """A probability or parameter lies outside the allowed range."""


class PreconditionError(MintermError):
    """A bound was requested for an input that does not satisfy its hypothesis.

    ``witness`` carries whatever object explains the failure (for example a
    tameness violation).
    """

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class DecompositionError(MintermError):
    """Neither branch of the structural decomposition could be certified."""
