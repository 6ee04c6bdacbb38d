"""Exception hierarchy shared by all modules."""


class OpenPathsError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 3


class QuantaleMismatchError(OpenPathsError, ValueError):
    """Two operands live in different weight domains."""


class DimensionMismatchError(OpenPathsError, ValueError):
    """Matrix shapes or vertex labels do not line up."""


class BoundaryMismatchError(OpenPathsError, ValueError):
    """Open networks cannot be composed along the given boundaries."""

    def __init__(self, message, left=None, right=None):
        super().__init__(message)
        self.left = left
        self.right = right


class NotFunctionalError(OpenPathsError, ValueError):
    """An operation needing functional open networks got a non-functional one."""


class NonConvergenceError(OpenPathsError, RuntimeError):
    """A fixpoint iteration did not stabilize within its budget."""

    exit_code = 4

    def __init__(self, message, iterations=None):
        super().__init__(message)
        self.iterations = iterations


class ParseError(OpenPathsError, ValueError):
    """Malformed input file or literal."""

    exit_code = 2

    def __init__(self, message, line=None, column=None, source=None):
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:{column or 0}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.source = source
