"""Exception hierarchy shared by all modules."""


class EmpiricalOError(Exception):
    """Base class for errors raised by this package."""


class InvalidParameterError(EmpiricalOError, ValueError):
    pass


class SingularDesignError(EmpiricalOError):
    def __init__(self, term: str, message: str | None = None):
        self.term = term
        super().__init__(message or f"design matrix is rank deficient at term {term!r}")


class DiagnosticsUndefinedError(EmpiricalOError):
    """Raised when a fit leaves zero residual degrees of freedom."""


class InvalidPairingError(EmpiricalOError):
    pass


class PreconditionError(EmpiricalOError):
    pass


class TableFormatError(EmpiricalOError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
