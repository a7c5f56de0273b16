"""Exception hierarchy shared by every module."""


class TreeStatError(Exception):
    """Base class for all errors raised by treestat."""


class InvalidVertex(TreeStatError, ValueError):
    """A label sequence that is not a vertex of the full m-ary tree."""


class ArityViolation(InvalidVertex):
    """A label outside ``1..m``."""


class OrphanVertex(TreeStatError, ValueError):
    """A vertex whose mother is absent from the set."""


class ArityMismatch(TreeStatError, ValueError):
    """Two objects built for different arities were combined."""


class DepthExceeded(TreeStatError, ValueError):
    """A tree is deeper than the depth cap it is used with."""


class EnumerationTooLarge(TreeStatError):
    """Exhaustive enumeration would produce too many trees."""


class UnsupportedModel(TreeStatError, TypeError):
    """The operation has no exact formula for this tree law."""


class CLTUnsafe(TreeStatError, ValueError):
    """Metric parameters outside the range where the Gaussian limit holds."""


class EmptySample(TreeStatError, ValueError):
    """A statistic was requested on a sample with no trees."""


class ParseError(TreeStatError, ValueError):
    """Malformed tree text or file contents."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
