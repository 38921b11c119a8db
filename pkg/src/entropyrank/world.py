"""Exact information-theoretic oracles over tiny enumerable phrase worlds.

A PhraseWorld treats a document as n random phrase slots, each taking one
of N dictionary values, with the joint distribution given by chaining an
n-gram model over phrase symbols (conditionals renormalized onto the
dictionary).  Because N**n is small by construction, marginal and
conditional entropies are computed by full enumeration rather than by any
approximation, which makes these the ground truth the ranked selection is
compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import GuardError, ValidationError
from .ngram import NGramModel

ENUMERATION_GUARD = 10**6


@dataclass(frozen=True)
class PhraseWorld:
    """n phrase-valued random slots over an N-value dictionary."""

    model: NGramModel
    dictionary: tuple[int, ...]
    n_positions: int

    def __post_init__(self):
        if self.n_positions < 1:
            raise ValidationError("world needs at least one position")
        if len(set(self.dictionary)) != len(self.dictionary) or not self.dictionary:
            raise ValidationError("dictionary must be a non-empty set of distinct ids")
        for t in self.dictionary:
            if not 0 <= t < self.model.vocab.size:
                raise ValidationError(f"dictionary id {t} outside model vocabulary")

    @property
    def n_outcomes(self) -> int:
        return len(self.dictionary) ** self.n_positions

    def _check_guard(self):
        if self.n_outcomes > ENUMERATION_GUARD:
            raise GuardError(
                f"world has {self.n_outcomes} joint outcomes, "
                f"exceeding the enumeration guard of {ENUMERATION_GUARD}"
            )

    def _conditional(self, prefix: tuple[int, ...]) -> np.ndarray:
        """Model conditional renormalized onto the dictionary."""
        probs = self.model.next_distribution(prefix).probs
        sub = probs[list(self.dictionary)]
        return sub / sub.sum()

    def joint(self) -> dict[tuple[int, ...], float]:
        """Full joint over dictionary-valued outcome tuples; sums to 1."""
        self._check_guard()
        frontier: dict[tuple[int, ...], float] = {(): 1.0}
        for _ in range(self.n_positions):
            nxt: dict[tuple[int, ...], float] = {}
            for prefix, p in frontier.items():
                cond = self._conditional(prefix)
                for value, q in zip(self.dictionary, cond):
                    nxt[prefix + (value,)] = p * float(q)
            frontier = nxt
        return frontier

    def position_entropies(self) -> list[float]:
        """Expected conditional entropy of each slot given its prefix.

        Entry i is H(X_i | X_{1:i-1}) in bits: the average, over prefix
        realizations, of the entropy of the renormalized conditional.
        These are the slot scores the ranked selection uses.
        """
        self._check_guard()
        out = []
        frontier: dict[tuple[int, ...], float] = {(): 1.0}
        for _ in range(self.n_positions):
            h_i = 0.0
            nxt: dict[tuple[int, ...], float] = {}
            for prefix, p in frontier.items():
                cond = self._conditional(prefix)
                nz = cond[cond > 0]
                h_i += p * float(-(nz * np.log2(nz)).sum())
                for value, q in zip(self.dictionary, cond):
                    nxt[prefix + (value,)] = p * float(q)
            frontier = nxt
            out.append(h_i)
        return out


def _validate_index_set(world: PhraseWorld, J) -> tuple[int, ...]:
    J = tuple(sorted(set(J)))
    for j in J:
        if not 0 <= j < world.n_positions:
            raise ValidationError(f"index {j} outside 0..{world.n_positions - 1}")
    return J


def _marginal(joint: dict[tuple[int, ...], float], J: tuple[int, ...]):
    marg: dict[tuple[int, ...], float] = {}
    for outcome, p in joint.items():
        key = tuple(outcome[j] for j in J)
        marg[key] = marg.get(key, 0.0) + p
    return marg


def joint_entropy(world: PhraseWorld) -> float:
    """H(X_{1:n}) by enumeration."""
    return -sum(p * math.log2(p) for p in world.joint().values() if p > 0)


def conditional_entropy_bruteforce(world: PhraseWorld, J) -> float:
    """Exact H(X_notJ | X_J) in bits by enumerating the full joint."""
    J = _validate_index_set(world, J)
    joint = world.joint()
    marg = _marginal(joint, J)
    h = 0.0
    for outcome, p in joint.items():
        if p <= 0:
            continue
        key = tuple(outcome[j] for j in J)
        h -= p * math.log2(p / marg[key])
    # conditioning on everything leaves exactly zero, modulo fp noise
    return max(h, 0.0)


def optimal_set_bruteforce(world: PhraseWorld, k: int) -> tuple[int, ...]:
    """Subset of size <= k minimizing H(X_notJ | X_J), by full search.

    Ties go to the lexicographically smallest index tuple.
    """
    if not 0 <= k <= world.n_positions:
        raise ValidationError(f"k={k} outside 0..{world.n_positions}")
    world._check_guard()
    best: tuple[float, tuple[int, ...]] | None = None
    for size in range(k + 1):
        for J in combinations(range(world.n_positions), size):
            h = conditional_entropy_bruteforce(world, J)
            if best is None or h < best[0] - 1e-12 or (abs(h - best[0]) <= 1e-12 and J < best[1]):
                best = (h, J)
    assert best is not None
    return best[1]


def entropy_rank_set(world: PhraseWorld, k: int) -> tuple[int, ...]:
    """Top-k slots by expected conditional entropy (the causal surrogate).

    This is the selection the extractor makes when slot scores are the
    expected per-position entropies; compare its conditional entropy with
    the exhaustive optimum from optimal_set_bruteforce.
    """
    if not 0 <= k <= world.n_positions:
        raise ValidationError(f"k={k} outside 0..{world.n_positions}")
    scores = world.position_entropies()
    order = sorted(range(world.n_positions), key=lambda i: (-scores[i], i))
    return tuple(sorted(order[:k]))
