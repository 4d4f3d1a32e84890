class PermstabError(Exception):
    """Base class for errors raised by this package."""


class PreconditionError(PermstabError):
    """A documented precondition of an operation does not hold."""


class BudgetExceeded(PermstabError):
    """An enumeration grew past its configured budget."""


class CertificateError(PermstabError):
    """A runtime-verified bound that must hold unconditionally failed."""
