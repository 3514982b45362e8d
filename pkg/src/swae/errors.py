"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
DataError -> 3, NumericError -> 4.
"""


class SwaeError(Exception):
    """Base class for all package errors."""


class DimensionError(SwaeError):
    """Array shapes are inconsistent with the operation's contract."""


class NumericError(SwaeError):
    """A value that must be finite is NaN or infinite."""


class ConfigError(SwaeError):
    """Invalid run configuration (bad key, bad value, bad flag)."""


class DataError(SwaeError):
    """A dataset or checkpoint file is missing or malformed."""


class IdxMagicError(DataError):
    """IDX file starts with the wrong magic number."""


class IdxTruncatedError(DataError):
    """IDX file ends before its declared payload."""


class IdxCountMismatchError(DataError):
    """Image and label files declare different item counts."""


class CheckpointError(DataError):
    """Checkpoint file is corrupt, truncated or of an unknown version."""
