"""Exception hierarchy shared by all modules."""


class CasimirKKError(Exception):
    """Base class for errors raised by this package."""


class DomainError(CasimirKKError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class UnsupportedModelError(CasimirKKError, TypeError):
    """The operation is not defined for the given permittivity model."""


class ConvergenceError(CasimirKKError, RuntimeError):
    """A quadrature or series failed to reach the requested tolerance."""


class ValidationError(CasimirKKError, ValueError):
    """Input data violates a structural invariant."""


class ParseError(CasimirKKError, ValueError):
    """A data or configuration file could not be parsed."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ExtrapolationError(CasimirKKError, ValueError):
    """A tabulated quantity was requested outside its range with no policy."""
