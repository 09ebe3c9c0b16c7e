"""Exception hierarchy shared by the library and the command line."""


class ScholarankError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ScholarankError, ValueError):
    """Invalid parameters or configuration file."""


class DataError(ScholarankError, ValueError):
    """Input data that cannot be processed (malformed files, empty evaluations)."""


class StagingError(ScholarankError, OSError):
    """Problems with the staging directory: missing, locked, or already populated."""
