# core/errors.py
from typing import Optional


class ReliacutError(Exception):
    """Base class for every error the CLI turns into an exit code."""
    exit_code: int = 1


# --- Usage / configuration problems (exit code 1) ---

class UsageError(ReliacutError):
    exit_code = 1


class ConfigError(UsageError):
    pass


class InvalidParameter(UsageError):
    pass


class BudgetTooSmall(UsageError):
    """The simulation budget cannot give every stratum at least one trial."""


class SampleTooSmall(UsageError):
    pass


# --- Problems with the input data itself (exit code 2) ---

class InputDataError(ReliacutError):
    exit_code = 2


class NetworkFormatError(InputDataError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class UnknownArc(InputDataError):
    pass


class SinkUnreachable(InputDataError):
    pass


class EmptyCutList(InputDataError):
    pass


class TooManyArcs(InputDataError):
    pass
