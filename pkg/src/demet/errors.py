"""Exception types shared across the pipeline.

Kept in one module so the CLI can map exception classes to exit codes
without importing every subsystem.
"""


class DemetError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(DemetError):
    """Schema is invalid, or data does not match the declared schema."""


class ParseError(DemetError):
    """Delimited input is structurally malformed (bad row width, etc.)."""


class DataError(DemetError):
    """Input data is unusable for the requested operation (e.g. empty)."""


class UnfittableError(DemetError):
    """Training data cannot produce a valid model (e.g. a class pool is empty)."""


class ModelFormatError(DemetError):
    """Model file is corrupt, truncated, or written by an unknown format version."""
