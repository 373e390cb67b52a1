from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Final

from burgerquad._pycompat import slots_if310

_NUMBER: Final = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
RANGE_PATTERN: Final = re.compile(
    rf"^\s*(?P<lo>{_NUMBER})\s*:\s*(?P<hi>{_NUMBER})\s*(?::\s*(?P<n>\d+)\s*)?$"
)
BRACKETED_PATTERN: Final = re.compile(
    rf"^\s*\[\s*(?P<lo>{_NUMBER})\s*,\s*(?P<hi>{_NUMBER})\s*\]\s*$"
)


@dataclass(frozen=True, order=True, **slots_if310())
class Interval:
    """A closed interval `[lo, hi]` of real numbers.

    >>> Interval(-1, 3).midpoint
    1.0
    >>> Interval(0, 1).contains(1.0)
    True
    """

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"Interval bounds must be finite: {self.lo}, {self.hi}")
        if self.lo > self.hi:
            raise ValueError(f"Interval lo must be <= hi: {self.lo} > {self.hi}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @staticmethod
    def around(a: float, b: float) -> Interval:
        """The interval spanning two values given in either order."""
        return Interval(min(a, b), max(a, b))

    @staticmethod
    def parse(text: str) -> Interval:
        """Parse `LO:HI` or `[LO, HI]`.

        >>> Interval.parse("[-10, 10]")
        Interval(lo=-10.0, hi=10.0)
        >>> Interval.parse("0.5:2")
        Interval(lo=0.5, hi=2.0)
        """
        match = BRACKETED_PATTERN.match(text) or RANGE_PATTERN.match(text)
        if not match or match.groupdict().get("n") is not None:
            raise ValueError(f"Not an interval: {text!r}")
        return Interval(float(match.group("lo")), float(match.group("hi")))

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def clamp(self, value: float) -> float:
        return min(max(value, self.lo), self.hi)

    def intersect(self, other: Interval) -> Interval | None:
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def __str__(self) -> str:
        return f"[{self.lo!r}, {self.hi!r}]"


def parse_sampling(text: str) -> tuple[Interval, int]:
    """Parse a sampled window `LO:HI:N` into its interval and point count.

    >>> parse_sampling("0:1:201")
    (Interval(lo=0.0, hi=1.0), 201)
    """
    match = RANGE_PATTERN.match(text)
    if not match or match.group("n") is None:
        raise ValueError(f"Not a sampled window LO:HI:N: {text!r}")
    n = int(match.group("n"))
    if n < 1:
        raise ValueError(f"Sample count must be >= 1: {text!r}")
    return Interval(float(match.group("lo")), float(match.group("hi"))), n
