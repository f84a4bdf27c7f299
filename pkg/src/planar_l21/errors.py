"""Exception types shared across the package."""


class L21Error(Exception):
    """Base class for all package errors."""


class ValidationError(L21Error):
    """A structural precondition failed (bad rotation, partial colouring, ...)."""


class CapacityError(L21Error):
    """An enumeration bound was exceeded; the request is refused, not attempted."""


class InconsistencyError(L21Error):
    """A witness contradicts itself (e.g. one literal coloured two ways)."""


class FormulaParseError(L21Error):
    """DIMACS input rejected; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
