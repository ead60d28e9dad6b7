"""Arithmetic in the cyclic group Z_m and unbiased uniform sampling.

Group elements are plain ints kept in canonical form 0 <= value < m.
Python integers are unbounded, so intermediate sums never overflow; the
2**63 cap on the modulus is a contract choice that keeps every residue
(and any pairwise sum) inside machine-word double-width.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable

GroupElement = int

MAX_MODULUS = 2**63


@dataclass(frozen=True)
class Modulus:
    """Order of the group Z_m; all protocol arithmetic reduces modulo m."""

    m: int

    def __post_init__(self) -> None:
        if not isinstance(self.m, int) or isinstance(self.m, bool):
            raise TypeError(f"modulus must be an int, got {type(self.m).__name__}")
        if self.m < 2:
            raise ValueError(f"modulus must be >= 2, got {self.m}")
        if self.m > MAX_MODULUS:
            raise ValueError(f"modulus must be <= 2**63, got {self.m}")


def add(a: GroupElement, b: GroupElement, mod: Modulus) -> GroupElement:
    return (a + b) % mod.m


def neg(a: GroupElement, mod: Modulus) -> GroupElement:
    return (-a) % mod.m


def group_sum(elements: Iterable[GroupElement], mod: Modulus) -> GroupElement:
    """Sum of the elements in Z_m; the empty sum is 0."""
    return sum(elements) % mod.m


def uniform_element(rng: random.Random, mod: Modulus) -> GroupElement:
    """Exactly uniform residue in [0, m).

    ``Random.randrange`` draws via rejection sampling over a power-of-two
    range (``getrandbits``), so every residue has probability exactly 1/m
    with no modulo bias.
    """
    return rng.randrange(mod.m)
