"""Shared error types and the ``OMEGA`` cardinal used for countable sizes."""
from __future__ import annotations

import math
from typing import Union

#: The first infinite cardinal. Compares greater than every natural number.
OMEGA = math.inf

Card = Union[int, float]

DEFAULT_CAP = 12


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """An exhaustive operation was asked to exceed its configured cap."""


class ContractError(RuntimeError):
    """An operation was called although its precondition is false."""


class ParseError(ValueError):
    """Malformed input file; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


def is_omega(value: Card) -> bool:
    return value == OMEGA


def fmt_card(value: Card) -> str:
    return "omega" if value == OMEGA else str(int(value))


def parse_card(token: str) -> Card:
    """Parse ``omega`` / ``w`` / a non-negative integer."""
    t = token.strip().lower()
    if t in ("omega", "w", "ω", "inf"):
        return OMEGA
    value = int(t)
    if value < 0:
        raise ValueError(f"negative cardinal {token!r}")
    return value


def card_sum(values) -> Card:
    total: Card = 0
    for v in values:
        if v == OMEGA:
            return OMEGA
        total += v
    return total
