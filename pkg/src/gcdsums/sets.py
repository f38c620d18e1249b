"""Finite sets of distinct positive integers, kept sorted ascending."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import DomainError


@dataclass(frozen=True)
class IntegerSet:
    """A strictly increasing tuple of positive integers (exact, unbounded width)."""

    elems: tuple[int, ...]

    def __post_init__(self) -> None:
        prev = 0
        for x in self.elems:
            if not isinstance(x, int):
                raise DomainError(f"non-integer element {x!r}")
            if x < 1:
                raise DomainError(f"element {x} is not a positive integer")
            if x <= prev:
                raise DomainError(f"elements not strictly increasing at {x}")
            prev = x

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "IntegerSet":
        elems = sorted(values)
        for a, b in zip(elems, elems[1:]):
            if a == b:
                raise DomainError(f"duplicate element {a}")
        return cls(tuple(int(x) for x in elems))

    def __len__(self) -> int:
        return len(self.elems)

    def __iter__(self) -> Iterator[int]:
        return iter(self.elems)

    def __contains__(self, x: object) -> bool:
        return x in self.elems

    def max(self) -> int:
        if not self.elems:
            raise DomainError("empty set has no maximum")
        return self.elems[-1]
