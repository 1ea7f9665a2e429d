"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class PDSpaceError(Exception):
    """Base class for library errors."""


class ValidationError(PDSpaceError, ValueError):
    """Malformed input: bad parameters, bad points, mismatched spaces."""


class SpaceMismatchError(ValidationError):
    pass


class CapabilityError(PDSpaceError):
    """The metric pair lacks a property the operation needs."""
