"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid sizes, ranges, or mismatched dimensions in a request."""


class DegenerateInputError(ValueError):
    """Input that is formally valid but has no defined result (e.g. a zero vector)."""


class ProgrammingError(RuntimeError):
    """Internal contract violation, e.g. an unresolved parameter slot."""


class AefvParseError(ValueError):
    """Malformed AEFV file; carries the 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class TrainingError(RuntimeError):
    """Training aborted (non-finite loss or gradients)."""
