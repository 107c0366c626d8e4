"""Exception hierarchy shared by every subpackage."""


class MBQError(Exception):
    """Base class for all errors raised by :mod:`mbq`."""


class StructuralError(MBQError):
    """Fields on mismatched grids, wrong shapes, or mixed boundary modes."""


class FieldValueError(MBQError):
    """Non-finite values or a Dirichlet field with a non-zero trace."""


class CoefficientBoundError(MBQError):
    """A coefficient fell to or below zero, or below its certified bound."""


class ParameterError(MBQError):
    """An argument outside its admissible range."""


class SolverFailure(MBQError):
    """An iterative solve or factorization did not converge."""


class CFLViolation(MBQError):
    """Requested time step exceeds the stability bound."""


class BlowUpError(MBQError):
    """NaN or Inf appeared in the state during time stepping."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


class InsufficientDataError(MBQError):
    """Too few samples for a fit."""


class ConfigError(MBQError):
    """Invalid run configuration."""


class SnapshotFormatError(MBQError):
    """Malformed or truncated snapshot file."""
