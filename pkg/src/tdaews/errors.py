"""Exception hierarchy shared by the library and the command line."""


class TDAError(Exception):
    """Base class for every error raised by :mod:`tdaews`."""


class ValidationError(TDAError, ValueError):
    """Input violates a documented precondition."""


class UnsupportedDimensionError(ValidationError):
    pass


class InsufficientDataError(ValidationError):
    pass


class DegenerateInputError(ValidationError):
    pass


class AlignmentError(ValidationError):
    pass


class FiltrationOrderError(TDAError, RuntimeError):
    """A filtration handed to the reduction is not in filtration order."""


class InputFormatError(TDAError, OSError):
    """A data file could not be parsed.

    Carries the path and the 1-based line number when known so the CLI can
    report where the problem is.
    """

    def __init__(self, message: str, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
