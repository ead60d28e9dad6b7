"""The split-and-mix summation protocol.

Each of n users splits its input into k additive shares; shuffler j mixes
the j-th shares of all users with a uniform random permutation; the server
sums everything it receives. The randomized-inputs variant gives each user
one extra share that is delivered unshuffled (position-aligned with the
user), which upgrades average-case security to worst-case security.
"""

from __future__ import annotations

import enum
import random
from collections.abc import Callable, Sequence
from dataclasses import dataclass

from .group import GroupElement, Modulus, group_sum
from .sharing import ShareVector, share, share_recursive


class Variant(enum.Enum):
    PLAIN = "plain"
    RANDOMIZED_INPUTS = "randomized"


@dataclass(frozen=True)
class Transcript:
    """Observable output of one protocol run.

    ``blocks[j]`` is shuffler j's output (n elements). ``clear_block`` is
    present only for the randomized-inputs variant and stays aligned with
    user indices -- it is never shuffled. Blocks keep their shuffler
    identity; the security analysis treats them as distinguishable.
    """

    blocks: tuple[tuple[GroupElement, ...], ...]
    clear_block: tuple[GroupElement, ...] | None = None

    @property
    def n(self) -> int:
        return len(self.blocks[0])

    @property
    def k(self) -> int:
        return len(self.blocks)

    @property
    def variant(self) -> Variant:
        return Variant.PLAIN if self.clear_block is None else Variant.RANDOMIZED_INPUTS

    def flattened(self) -> tuple[GroupElement, ...]:
        """All kn (or (k+1)n) residues, block-ordered."""
        flat = tuple(v for block in self.blocks for v in block)
        if self.clear_block is not None:
            flat += self.clear_block
        return flat


def shuffle_block(elements: Sequence[GroupElement], rng: random.Random) -> tuple[GroupElement, ...]:
    """Uniform random permutation of the elements (Fisher-Yates)."""
    if len(elements) == 0:
        raise ValueError("cannot shuffle an empty block")
    out = list(elements)
    rng.shuffle(out)
    return tuple(out)


ShareHook = Callable[[list[ShareVector]], None]


def _check_run_args(n: int, k: int) -> None:
    if n < 1:
        raise ValueError(f"need at least one user, got n={n}")
    if k < 1:
        raise ValueError(f"need at least one shuffled share, got k={k}")


def run_ikos(
    inputs: Sequence[GroupElement],
    k: int,
    m: Modulus,
    rng: random.Random,
    on_shares: ShareHook | None = None,
) -> Transcript:
    """One execution of the plain protocol: share every input into k
    pieces, then shuffle each share index independently across users.

    Sharing happens user by user, then block j is shuffled from the users'
    j-th shares taken in user-index order; fixing that pre-shuffle order
    keeps runs reproducible without affecting the output law. ``on_shares``
    receives the per-user share vectors before shuffling (test hook).
    """
    _check_run_args(len(inputs), k)
    per_user = [share(x, k, m, rng) for x in inputs]
    if on_shares is not None:
        on_shares(per_user)
    blocks = tuple(
        shuffle_block(tuple(sv.shares[j] for sv in per_user), rng) for j in range(k)
    )
    return Transcript(blocks)


def run_ikos_randomized(
    inputs: Sequence[GroupElement],
    k: int,
    m: Modulus,
    rng: random.Random,
    on_shares: ShareHook | None = None,
) -> Transcript:
    """One execution of the randomized-inputs variant: k+1 shares per user,
    k of them shuffled as in the plain run, the last sent in the clear and
    kept in user order."""
    _check_run_args(len(inputs), k)
    split = [share_recursive(x, k + 1, m, rng) for x in inputs]
    per_user = [body for body, _ in split]
    clear = tuple(u for _, u in split)
    if on_shares is not None:
        on_shares([ShareVector((*body.shares, u), m) for body, u in split])
    blocks = tuple(
        shuffle_block(tuple(sv.shares[j] for sv in per_user), rng) for j in range(k)
    )
    return Transcript(blocks, clear)


def aggregate(t: Transcript, m: Modulus) -> GroupElement:
    """Sum of every element in the transcript; equals the input sum exactly
    because the blocks are a (rearranged) set of all shares."""
    return group_sum(t.flattened(), m)


def transcript_to_dict(t: Transcript, m: Modulus, seed: int) -> dict:
    """JSON-shaped serialization: {n, k, m, variant, blocks, clear_block, seed}."""
    return {
        "n": t.n,
        "k": t.k,
        "m": m.m,
        "variant": t.variant.value,
        "blocks": [list(b) for b in t.blocks],
        "clear_block": list(t.clear_block) if t.clear_block is not None else None,
        "seed": seed,
    }


def transcript_from_dict(d: dict) -> tuple[Transcript, Modulus, int]:
    blocks = tuple(tuple(b) for b in d["blocks"])
    clear = tuple(d["clear_block"]) if d["clear_block"] is not None else None
    t = Transcript(blocks, clear)
    if t.n != d["n"] or t.k != d["k"] or t.variant.value != d["variant"]:
        raise ValueError("transcript record is inconsistent with its parameters")
    return t, Modulus(d["m"]), d["seed"]
