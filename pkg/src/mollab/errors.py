"""Error hierarchy shared by all modules.

Each error class carries a distinct process exit code so the CLI can
signal the failure category, and the HTTP layer can map categories to
status codes.
"""


class LabError(Exception):
    """Base class for all laboratory errors."""

    exit_code = 1


class ConfigError(LabError):
    """Malformed run configuration (unknown key, bad value, bad file)."""

    exit_code = 2


class PreconditionError(LabError):
    """An operation was called outside its stated domain."""

    exit_code = 3


class ConditioningError(LabError):
    """A linear solve hit a pivot too small to trust."""

    exit_code = 4

    def __init__(self, message: str, pivot: float = float("nan")):
        super().__init__(message)
        self.pivot = pivot


class AccuracyError(LabError):
    """A numerical routine could not certify its accuracy target."""

    exit_code = 5


class BudgetError(LabError):
    """Requested computation exceeds the configured cost budget."""

    exit_code = 6
