"""Exception hierarchy shared by all modules."""


class DiracBCError(Exception):
    """Base class for every error raised by the package."""


class InvalidArgumentError(DiracBCError, ValueError):
    pass


class FormatError(DiracBCError, ValueError):
    """A data file does not follow the expected layout.

    ``line`` is the 1-based line number of the offending line, or ``None``
    when the problem concerns the file as a whole (e.g. a row-count mismatch).
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}"
        if line is not None:
            where = f"{where}:{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class IllPosedDataError(DiracBCError):
    """The data cannot be a response function (characterization failed)."""

    def __init__(self, message, xi=None):
        self.xi = xi
        super().__init__(message)


class NumericalError(DiracBCError, ArithmeticError):
    pass


class SingularMatrixError(NumericalError):
    pass
