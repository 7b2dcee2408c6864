"""Exception hierarchy. Each class carries the CLI exit code it maps to."""
from typing import Any, Dict, Optional


class EmotionCoreError(Exception):
    """Base exception for emotion_core."""
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}


class ArtifactIOError(EmotionCoreError):
    """Raised when an input cannot be read or an output cannot be written."""
    exit_code = 1


class ConfigError(EmotionCoreError):
    """Raised when a parameter or flag is out of range or inconsistent."""
    exit_code = 2


class ParseError(EmotionCoreError):
    """Raised when an input line or row cannot be parsed."""
    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, details)
        self.line = line


class DataValidationError(EmotionCoreError):
    """Raised when parsed data violates a dataset invariant."""
    exit_code = 2


class StatsError(EmotionCoreError):
    """Raised when item statistics are missing, empty or unclassified."""
    exit_code = 2


class EvaluationError(EmotionCoreError):
    """Raised when a metric has nothing to evaluate."""
    exit_code = 2


class NumericalError(EmotionCoreError):
    """Raised when a computation produces non-finite values."""
    exit_code = 3


class DivergenceError(NumericalError):
    """Raised when SGD training produces non-finite parameters."""

    def __init__(self, message: str, epoch: int, step: int):
        super().__init__(message, {"epoch": epoch, "step": step})
        self.epoch = epoch
        self.step = step


class GradientError(NumericalError):
    """Raised when a gradient is non-finite; names the loss branch."""

    def __init__(self, message: str, branch: str):
        super().__init__(message, {"branch": branch})
        self.branch = branch


class ComparisonError(EmotionCoreError):
    """Raised after a comparison run in which one or more algorithms failed."""

    def __init__(self, failures: Dict[str, EmotionCoreError], reports: list):
        names = ", ".join(failures)
        super().__init__(f"Algorithms failed: {names}", {"failed": list(failures)})
        self.failures = failures
        self.reports = reports
        self.exit_code = max((getattr(e, "exit_code", 1) for e in failures.values()), default=1)
