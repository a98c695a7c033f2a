"""Exception types shared across the pipeline."""


class AtlasError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AtlasError):
    """A file or payload does not match its declared format."""

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class ParameterError(AtlasError, ValueError):
    """An argument is outside its documented range."""


class InputError(AtlasError, ValueError):
    """Structurally invalid input (partial labeling, coverage mismatch)."""


class UnknownNodeError(AtlasError, LookupError):
    """A node id is not present in the graph or map."""


class MissingEdgeError(AtlasError, LookupError):
    """The requested edge does not exist."""


class FetchError(AtlasError):
    """An HTTP download failed."""

    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class IntegrityError(AtlasError):
    """Downloaded bytes disagree with a previously recorded checksum."""


class ConvergenceError(AtlasError):
    """An iterative method hit its iteration cap before converging."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConnectivityError(AtlasError):
    """A statistic that requires a connected graph got a disconnected one."""


class StatisticError(AtlasError):
    """The requested statistic is undefined on this input."""


class FitError(AtlasError):
    """Not enough usable points to fit the requested model."""
