"""Lazy enumerations of rationals via the Calkin-Wilf sequence."""
from __future__ import annotations

from fractions import Fraction
from itertools import islice
from math import floor
from typing import Iterator


def calkin_wilf() -> Iterator[Fraction]:
    """1, 1/2, 2, 1/3, 3/2, 2/3, 3, ... : every positive rational once."""
    q = Fraction(1)
    while True:
        yield q
        q = 1 / (2 * floor(q) - q + 1)


def unit_interior() -> Iterator[Fraction]:
    """Rationals of (0, 1) in Calkin-Wilf order."""
    return (q for q in calkin_wilf() if q < 1)


def all_rationals() -> Iterator[Fraction]:
    """0, then q, -q for each positive q in Calkin-Wilf order."""
    yield Fraction(0)
    for q in calkin_wilf():
        yield q
        yield -q


class Cached:
    """Random access into an infinite generator, memoised."""

    def __init__(self, factory):
        self._it = factory()
        self._items = []

    def __getitem__(self, i: int):
        if i < 0:
            raise IndexError(i)
        if i >= len(self._items):
            self._items.extend(islice(self._it, i + 1 - len(self._items)))
        return self._items[i]


UNIT_INTERIOR = Cached(unit_interior)
RATIONALS = Cached(all_rationals)
