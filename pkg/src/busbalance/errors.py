"""Exception types raised across the package."""

from __future__ import annotations


class InputError(ValueError):
    """Bad user input: out-of-range indices, malformed parameters, etc."""


class InfeasibleMatchingError(InputError):
    """No perfect matching exists on the feasible cells of a cost matrix."""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"infeasible matching: row {row} cannot be matched")


class FormatError(InputError):
    """A file could not be parsed. ``locus`` names the line or field at fault."""

    def __init__(self, message: str, locus: str | None = None):
        self.locus = locus
        super().__init__(f"{locus}: {message}" if locus else message)


class ScheduleValidationError(InputError):
    """A schedule does not satisfy partition/compatibility/chain-length rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid schedule: {lines}")
