"""Exception taxonomy, mapped onto CLI exit codes in reachout.cli."""


class ReachoutError(Exception):
    """Base class for all engine errors."""


class ValidationError(ReachoutError):
    """Bad input data or parameters (exit code 1)."""


class OracleBoundError(ValidationError):
    """Instance too large for the exact enumeration oracle."""


class StateMachineError(ReachoutError):
    """Illegal campaign state transition (exit code 3)."""
