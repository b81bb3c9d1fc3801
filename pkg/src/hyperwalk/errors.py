"""Exception types raised by hyperwalk."""


class HyperwalkError(Exception):
    """Base class for domain errors (mapped to exit code 1 by the CLI)."""


class ParseError(HyperwalkError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class IsolatedNodeError(HyperwalkError):
    """A node has zero hyperdegree, so the walk is undefined there."""

    def __init__(self, label):
        self.label = label
        super().__init__(
            f"node {label!r} has zero hyperdegree (it only belongs to size-1 hyperedges)"
        )


class ConnectivityError(HyperwalkError):
    """The hypergraph (or transition matrix) is not connected."""


class NumericalError(HyperwalkError, ArithmeticError):
    pass


class OptimizationWarning(RuntimeWarning):
    pass
