"""Exception hierarchy shared by all modules."""


class PathAlgError(ValueError):
    """Base class for domain errors (CLI exit status 1)."""


class DimensionMismatch(PathAlgError):
    pass


class IndexOutOfRange(PathAlgError):
    pass


class InvalidWord(PathAlgError):
    pass


class NotALieElement(PathAlgError):
    pass


class NotInP(PathAlgError):
    """Raised when an operator does not lie in the image of the path algebroid."""


class NotInvertible(PathAlgError):
    pass


class CapTooSmall(PathAlgError):
    pass


class EndpointMismatch(PathAlgError):
    pass


class ParseError(PathAlgError):
    """Syntax error in an operator expression; carries 1-based line/column."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        self.bare = message
        super().__init__(f"syntax error at line {line}, column {column}: {message}")
