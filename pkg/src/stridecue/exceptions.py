"""Exception hierarchy shared across stridecue modules."""


class StrideCueError(Exception):
    """Base class for all errors raised by stridecue."""


class ParameterError(StrideCueError, ValueError):
    """An argument or configuration value violates its documented range."""


class DomainError(StrideCueError, ValueError):
    pass


class GenerationError(StrideCueError):
    """A generated series would contain a non-positive duration."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class CalibrationError(StrideCueError, ValueError):
    pass


class DataError(StrideCueError, ValueError):
    """Input data is malformed. ``line`` is the 1-based source line when known."""

    def __init__(self, message, line=None, path=None):
        parts = []
        if path is not None:
            parts.append(str(path))
        if line is not None:
            parts.append(f"line {line}")
        prefix = ":".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.path = path


class UndefinedSpectrumError(StrideCueError, ValueError):
    """The series has zero variance, so no spectral exponent exists."""


class AnalysisError(StrideCueError, ValueError):
    pass
