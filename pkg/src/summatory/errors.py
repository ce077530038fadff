"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the supported domain of an operation."""


class AccuracyError(ArithmeticError):
    """A numerical routine cannot meet its accuracy contract with the given parameters."""


class SingularityError(ArithmeticError):
    """Evaluation hit a zero/pole of the underlying function within tolerance."""


class CheckpointParseError(ValueError):
    """A checkpoint file is malformed. Carries the 1-based offending line number."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")
