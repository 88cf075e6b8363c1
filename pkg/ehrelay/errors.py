# ehrelay/errors.py
"""Exception hierarchy shared by every ehrelay sub-package.

Infeasible candidate solutions are *results* (see :class:`ehrelay.model.Verdict`),
not exceptions; the classes here cover misuse and refusals only.
"""
from typing import Any


class EhRelayError(Exception):
    """Base class of all errors raised by ehrelay."""


class ConfigError(EhRelayError):
    """Invalid or unreadable configuration (CLI exit status 2)."""


class DomainError(EhRelayError, ValueError):
    """An argument lies outside the domain of a mathematical operation."""


class GuardError(EhRelayError):
    """A search-size guard refused to start an enumeration (CLI exit status 3)."""

    def __init__(self, message: str, cells: int, limit: int):
        super().__init__(message)
        self.cells = cells
        self.limit = limit


class InfeasibleStartError(EhRelayError):
    """A reference point handed to a GP builder or to SCA violates a true constraint."""

    def __init__(self, violation: Any):
        super().__init__(f"reference point violates {violation}")
        self.violation = violation
