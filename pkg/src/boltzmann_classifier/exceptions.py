"""Exception hierarchy shared by every module."""


class BoltzmannError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(BoltzmannError, ValueError):
    """Input data violates a precondition (empty, non-finite, ...)."""


class ShapeError(InvalidInputError):
    """Array dimensions or feature schema do not match."""


class ParameterError(BoltzmannError, ValueError):
    """A hyperparameter is out of its valid range."""


class FitError(BoltzmannError):
    """Model fitting failed, e.g. a declared class has no samples."""


class DataError(BoltzmannError):
    """A dataset file could not be read or validated."""


class UnsupportedError(BoltzmannError):
    """The operation is not defined for this input (e.g. non-binary)."""


class PDBParseError(DataError):
    """A PDB record could not be parsed."""
