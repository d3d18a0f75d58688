"""Exception hierarchy shared by all graph-ceps modules."""


class GraphCepsError(Exception):
    """Base class for all errors raised by this package."""


class InvalidTopologyError(GraphCepsError):
    """Malformed connection topology (bad partition, too few channels, ...)."""


class InvalidParameterError(GraphCepsError):
    """Parameter outside its documented range, or malformed configuration."""


class InvalidMatrixError(GraphCepsError):
    """Matrix input violates a structural precondition (e.g. not symmetric)."""


class InvalidInputError(GraphCepsError):
    """Data input violates a precondition (shape mismatch, empty clip, ...)."""


class NumericalError(GraphCepsError):
    """An iterative numerical procedure failed to converge."""
