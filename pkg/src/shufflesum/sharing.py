"""Additive secret sharing: split a group element into k uniform shares
that sum back to it."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .group import GroupElement, Modulus, group_sum, uniform_element


@dataclass(frozen=True)
class ShareVector:
    """k additive shares of one secret; the shares sum to the secret mod m."""

    shares: tuple[GroupElement, ...]
    m: Modulus

    @property
    def k(self) -> int:
        return len(self.shares)


def share(x: GroupElement, k: int, m: Modulus, rng: random.Random) -> ShareVector:
    """Split x into k shares: the first k-1 are i.i.d. uniform and the last
    one solves the sum, which makes the joint law uniform over all k-tuples
    summing to x. k = 1 returns (x,) unchanged.
    """
    if k < 1:
        raise ValueError(f"need at least one share, got k={k}")
    head = [uniform_element(rng, m) for _ in range(k - 1)]
    last = (x - sum(head)) % m.m
    return ShareVector((*head, last), m)


def reconstruct(s: ShareVector) -> GroupElement:
    return group_sum(s.shares, s.m)


def share_recursive(
    x: GroupElement, k_plus_1: int, m: Modulus, rng: random.Random
) -> tuple[ShareVector, GroupElement]:
    """Split x into k_plus_1 shares by first masking it with a uniform
    element u: returns (share(x - u, k_plus_1 - 1), u).

    The concatenation (shares..., u) is distributed exactly like
    share(x, k_plus_1); the split form is what lets the protocol send the
    final share in the clear.
    """
    if k_plus_1 < 2:
        raise ValueError(f"recursive split needs k_plus_1 >= 2, got {k_plus_1}")
    u = uniform_element(rng, m)
    body = share((x - u) % m.m, k_plus_1 - 1, m, rng)
    return body, u
