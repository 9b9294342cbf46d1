"""Exception types shared across the package."""


class SsflabError(Exception):
    """Base class for all package errors."""


class ParameterError(SsflabError, ValueError):
    """A scalar argument is outside its admissible range."""


class DomainError(SsflabError, ValueError):
    """A scalar function was evaluated outside its domain."""


class SingularityError(SsflabError, ValueError):
    """A resolvent parameter collided with the spectrum."""


class ContractError(SsflabError, ValueError):
    """An operator-valued argument violates a documented precondition."""


class ConfigurationError(SsflabError, ValueError):
    """An experiment configuration is inconsistent or cannot be honoured."""


class EigensolverError(SsflabError, RuntimeError):
    """The dense eigensolver failed to converge."""
