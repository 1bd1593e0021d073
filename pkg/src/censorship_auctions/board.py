"""Bulletin-board designs and the price of censoring a write on each.

Blocks are uncongested: a proposer loses nothing but the tip when it drops a
transaction, so censoring costs exactly the forgone tips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InputError


class BoardSpec:
    """A bulletin-board design. ``multiplier`` is the number of proposers a
    briber must pay to keep a flat-tipped write off the board."""

    multiplier = 1

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class SingleBlock(BoardSpec):
    multiplier = 1

    def to_dict(self):
        return {"type": "single"}


@dataclass(frozen=True)
class SequentialBlocks(BoardSpec):
    """``m`` blocks with rotating, independent proposers."""

    m: int

    def __post_init__(self):
        if not isinstance(self.m, int) or self.m < 1:
            raise InputError(f"sequential boards need m >= 1 blocks, got {self.m!r}")

    @property
    def multiplier(self):
        return self.m

    def to_dict(self):
        return {"type": "sequential", "m": self.m}


@dataclass(frozen=True)
class ConcurrentProposers(BoardSpec):
    """``k`` proposers building blocks for the same slot."""

    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 2:
            raise InputError(f"concurrent boards need k >= 2 proposers, got {self.k!r}")

    @property
    def multiplier(self):
        return self.k

    def to_dict(self):
        return {"type": "concurrent", "k": self.k}


def _nonneg(name, x):
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x >= 0.0):
        raise InputError(f"{name} must be a finite nonnegative number, got {x!r}")


@dataclass(frozen=True)
class Flat:
    t: float

    def __post_init__(self):
        _nonneg("tip", self.t)


@dataclass(frozen=True)
class Conditional:
    """Twin tip: ``T`` if exactly one proposer includes, ``t`` otherwise."""

    t: float
    T: float

    def __post_init__(self):
        _nonneg("t", self.t)
        _nonneg("T", self.T)
        if self.T < self.t:
            raise InputError(f"conditional tip needs T >= t, got t={self.t!r}, T={self.T!r}")


TipOffer = Flat | Conditional


def censorship_resistance(board: BoardSpec, offer: TipOffer) -> float:
    """Minimum total bribe that makes a write with this tip fail."""
    if isinstance(board, ConcurrentProposers):
        if not isinstance(offer, Conditional):
            raise InputError("concurrent proposers price conditional tips (t, T)")
        return board.k * offer.T
    if isinstance(board, (SingleBlock, SequentialBlocks)):
        if not isinstance(offer, Flat):
            raise InputError(f"{type(board).__name__} takes a flat tip")
        return board.multiplier * offer.t
    raise InputError(f"unknown board {board!r}")


def board_from_dict(data: dict) -> BoardSpec:
    kind = data.get("type") if isinstance(data, dict) else None
    if kind == "single":
        return SingleBlock()
    if kind == "sequential":
        return SequentialBlocks(_int_field(data, "m"))
    if kind == "concurrent":
        return ConcurrentProposers(_int_field(data, "k"))
    raise InputError(f"unknown board description {data!r}")


def offer_from_dict(data: dict) -> TipOffer:
    if not isinstance(data, dict) or "t" not in data:
        raise InputError(f"tip description needs a 't' key: {data!r}")
    if "T" in data:
        return Conditional(float(data["t"]), float(data["T"]))
    return Flat(float(data["t"]))


def _int_field(data, key):
    val = data.get(key)
    if isinstance(val, bool) or not isinstance(val, int):
        raise InputError(f"board field {key!r} must be an integer, got {val!r}")
    return val
