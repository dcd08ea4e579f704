"""The order-state alphabet and the observed state sequence type."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np


class OrderState(str, Enum):
    """The ten order event types used as Markov states.

    Member definition order is the canonical index order used by every
    matrix and table in the package.
    """

    AB = "AB"
    AA = "AA"
    DB = "DB"
    DA = "DA"
    FB = "FB"
    FA = "FA"
    EB = "EB"
    EA = "EA"
    CB = "CB"
    CA = "CA"

    @property
    def index(self) -> int:
        return _INDEX[self]

    @property
    def event_type(self) -> str:
        return _EVENT_TYPE[self]

    @classmethod
    def from_event_type(cls, text: str) -> "OrderState":
        return _FROM_EVENT_TYPE[text.strip().upper()]

    def __str__(self) -> str:
        return self.value


_INDEX = {s: i for i, s in enumerate(OrderState)}

_EVENT_TYPE = {
    OrderState.AB: "ADD-BID",
    OrderState.AA: "ADD-ASK",
    OrderState.CB: "CANCEL-BID",
    OrderState.CA: "CANCEL-ASK",
    OrderState.DB: "DELETE-BID",
    OrderState.DA: "DELETE-ASK",
    OrderState.EB: "EXECUTE-BID",
    OrderState.EA: "EXECUTE-ASK",
    OrderState.FB: "FILL-BID",
    OrderState.FA: "FILL-ASK",
}
_FROM_EVENT_TYPE = {v: k for k, v in _EVENT_TYPE.items()}

#: Canonical state labels, in index order.
ORDER_ALPHABET: tuple[str, ...] = tuple(s.value for s in OrderState)

EVENT_TYPES: tuple[str, ...] = tuple(_EVENT_TYPE[s] for s in OrderState)


@dataclass(frozen=True, eq=False)
class StateSequence:
    """Observed path of one chain, e.g. one stock on one trading day.

    States are held as small integer codes into ``alphabet`` so long
    sequences stay compact; ``states`` gives the labels back.
    """

    codes: np.ndarray
    alphabet: tuple[str, ...] = ORDER_ALPHABET
    ticker: str = ""
    date: dt.date | None = None

    def __post_init__(self):
        codes = np.asarray(self.codes)
        if codes.ndim != 1:
            raise ValueError("codes must be one-dimensional")
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.alphabet)):
            raise ValueError("state code outside the alphabet")
        codes = codes.astype(np.intp, copy=True)
        codes.flags.writeable = False
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "alphabet", tuple(str(a) for a in self.alphabet))

    @classmethod
    def from_states(
        cls,
        states: Iterable[str],
        alphabet: Sequence[str] = ORDER_ALPHABET,
        ticker: str = "",
        date: dt.date | None = None,
    ) -> "StateSequence":
        lookup = {str(a): i for i, a in enumerate(alphabet)}
        try:
            codes = [lookup[str(s)] for s in states]
        except KeyError as exc:
            raise ValueError(f"state {exc.args[0]!r} not in alphabet") from None
        return cls(np.array(codes, dtype=np.intp), tuple(alphabet), ticker, date)

    @property
    def states(self) -> list[str]:
        return [self.alphabet[c] for c in self.codes]

    @property
    def length(self) -> int:
        return int(self.codes.size)

    def __len__(self) -> int:
        return self.length

    def __eq__(self, other):
        if not isinstance(other, StateSequence):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and self.ticker == other.ticker
            and self.date == other.date
            and np.array_equal(self.codes, other.codes)
        )

    __hash__ = None
