"""Exception types shared across the package.

Every domain error derives from :class:`FirstError`; the CLI maps these to
exit code 1 and prints the class name as the typed reason.
"""

from __future__ import annotations


class FirstError(Exception):
    """Base class for domain errors."""

    @property
    def reason(self) -> str:
        return type(self).__name__


# -- VDF ---------------------------------------------------------------------

class VdfError(FirstError, ValueError):
    pass


class EvenModulus(VdfError):
    pass


class TinyModulus(VdfError):
    pass


class DifficultyOverflow(VdfError):
    pass


class InputOutOfRange(VdfError):
    pass


# -- aggregate signatures ----------------------------------------------------

class AggregationError(FirstError, ValueError):
    pass


class LengthMismatch(AggregationError):
    pass


class Empty(AggregationError):
    pass


# -- protocol ----------------------------------------------------------------

class ProtocolError(FirstError):
    pass


class EvenVerifierCount(ProtocolError, ValueError):
    pass


class SetupFailed(ProtocolError):
    pass


class PendingPoolNotEmpty(ProtocolError):
    pass


class EpochConstraintViolated(ProtocolError, ValueError):
    pass


class SessionAborted(ProtocolError):
    """Raised when a user exhausts the retry budget without a valid transaction."""


# -- chain simulator ---------------------------------------------------------

class ConfigInvalid(FirstError, ValueError):
    pass


# -- analytics ---------------------------------------------------------------

class AnalyticsError(FirstError):
    pass


class SchemaMismatch(AnalyticsError, ValueError):
    pass


class EmptyTrace(AnalyticsError, ValueError):
    pass


class MalformedRow(AnalyticsError, ValueError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Infeasible(AnalyticsError):
    pass
