"""Exception hierarchy shared by every orderflow module."""


class OrderflowError(Exception):
    """Base class for all errors raised by this package."""


# -- ingest -----------------------------------------------------------------

class IngestError(OrderflowError):
    """A problem decoding the order-event log."""


class MissingColumn(IngestError):
    def __init__(self, column):
        super().__init__(f"header lacks required column {column!r}")
        self.column = column


class BadRow(IngestError):
    """A single row could not be decoded. Recoverable: decoding may continue."""

    def __init__(self, line, reason):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class UnknownEventType(BadRow):
    def __init__(self, line, text):
        super().__init__(line, f"unknown event type {text!r}")
        self.text = text


class OutOfSession(BadRow):
    """Timestamp falls outside the 04:00-20:00 exchange session."""


# -- volatility -------------------------------------------------------------

class VolatilityError(OrderflowError):
    pass


class NonPositiveLow(VolatilityError):
    pass


class InsufficientData(VolatilityError):
    pass


# -- markov -----------------------------------------------------------------

class MarkovError(OrderflowError):
    pass


class SequenceTooShort(MarkovError):
    pass


class StateSetMismatch(MarkovError):
    pass


class EmptyCounts(MarkovError):
    pass


class NotErgodic(MarkovError):
    pass


class SingularSystem(MarkovError):
    pass


class ZeroStationaryMass(MarkovError):
    pass


class NoConvergence(MarkovError):
    pass


# -- simulate ---------------------------------------------------------------

class InvalidDistribution(OrderflowError):
    pass


class InsufficientOccurrences(OrderflowError):
    pass


# -- report -----------------------------------------------------------------

class EmptySector(OrderflowError):
    pass


class InvalidMatrixFile(OrderflowError):
    pass
