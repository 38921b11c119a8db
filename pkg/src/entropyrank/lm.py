"""Vocabulary, token distributions, and entropy primitives.

Everything downstream (scoring, coding, brute-force oracles) consumes the
two building blocks defined here: a dense integer vocabulary with reserved
begin/end markers, and a probability vector over that vocabulary.  All
information quantities are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .errors import ParseError, ValidationError

_SUM_TOL = 1e-9

# Token surfaces are stored one per line in vocabulary files; control
# characters that would break the line format are escaped.
_UNESCAPES = {"\\\\": "\\", "\\n": "\n", "\\r": "\r", "\\t": "\t"}


def _escape_surface(surface: str) -> str:
    out = surface.replace("\\", "\\\\")
    out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
    return out


def _unescape_surface(line: str) -> str:
    parts = []
    i = 0
    while i < len(line):
        if line[i] == "\\" and i + 1 < len(line):
            pair = line[i : i + 2]
            if pair in _UNESCAPES:
                parts.append(_UNESCAPES[pair])
                i += 2
                continue
        parts.append(line[i])
        i += 1
    return "".join(parts)


@dataclass(frozen=True)
class Vocabulary:
    """Dense bidirectional token-id <-> surface map with reserved markers.

    Ids run 0..size-1.  ``bos_id`` pads contexts at sequence starts and
    ``eos_id`` marks sequence ends; both occupy regular slots in the table.
    """

    surfaces: tuple[str, ...]
    bos_id: int
    eos_id: int
    _index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.surfaces) < 2:
            raise ValidationError("vocabulary needs at least BOS and EOS entries")
        if len(set(self.surfaces)) != len(self.surfaces):
            raise ValidationError("vocabulary surfaces must be unique")
        for name, value in (("bos_id", self.bos_id), ("eos_id", self.eos_id)):
            if not 0 <= value < len(self.surfaces):
                raise ValidationError(f"{name}={value} outside 0..{len(self.surfaces) - 1}")
        if self.bos_id == self.eos_id:
            raise ValidationError("BOS and EOS must be distinct ids")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.surfaces)})

    @property
    def size(self) -> int:
        return len(self.surfaces)

    def id_of(self, surface: str) -> int:
        try:
            return self._index[surface]
        except KeyError:
            raise KeyError(f"token surface not in vocabulary: {surface!r}") from None

    def surface_of(self, token_id: int) -> str:
        return self.surfaces[token_id]

    def __contains__(self, surface: str) -> bool:
        return surface in self._index

    @classmethod
    def from_surfaces(
        cls, surfaces: Sequence[str], bos: str = "<s>", eos: str = "</s>"
    ) -> "Vocabulary":
        """Build a vocabulary with BOS/EOS prepended at ids 0 and 1."""
        seen = {bos, eos}
        rest = []
        for s in surfaces:
            if s not in seen:
                seen.add(s)
                rest.append(s)
        return cls(surfaces=(bos, eos, *rest), bos_id=0, eos_id=1)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#bos={self.bos_id} #eos={self.eos_id}\n")
            for surface in self.surfaces:
                fh.write(_escape_surface(surface) + "\n")

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith("#bos="):
                raise ParseError("vocabulary header must be '#bos=<id> #eos=<id>'", 1)
            try:
                bos_part, eos_part = header.split()
                bos_id = int(bos_part.removeprefix("#bos="))
                eos_id = int(eos_part.removeprefix("#eos="))
            except ValueError:
                raise ParseError(f"malformed vocabulary header: {header!r}", 1) from None
            surfaces = [_unescape_surface(line.rstrip("\n")) for line in fh]
        return cls(surfaces=tuple(surfaces), bos_id=bos_id, eos_id=eos_id)


class TokenDistribution:
    """Probability vector over the vocabulary.

    Entries must be non-negative and sum to 1 within 1e-9.  Instances are
    immutable and hashed by identity, which lets callers memoize derived
    structures (e.g. quantized CDFs) cheaply.
    """

    __slots__ = ("probs",)

    def __init__(self, probs):
        arr = np.asarray(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("distribution must be a non-empty 1-d vector")
        if np.any(arr < 0):
            raise ValidationError("distribution has negative entries")
        total = float(arr.sum())
        if abs(total - 1.0) > _SUM_TOL:
            raise ValidationError(f"distribution sums to {total!r}, expected 1 within {_SUM_TOL}")
        arr.setflags(write=False)
        self.probs = arr

    @property
    def size(self) -> int:
        return int(self.probs.size)

    def __getitem__(self, token_id: int) -> float:
        return float(self.probs[token_id])

    def __repr__(self):
        return f"TokenDistribution(size={self.size})"


@runtime_checkable
class CausalLM(Protocol):
    """Next-token distribution given the realized prefix.

    Implementations must be deterministic: identical contexts yield
    identical distributions.  ``max_context`` is the number of trailing
    context tokens the model actually conditions on (None = unbounded).
    """

    max_context: int | None

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution: ...


def truncate_context(context: Sequence[int], max_context: int | None) -> Sequence[int]:
    """Keep the most recent ``max_context`` tokens (sliding-window rule)."""
    if max_context is None or len(context) <= max_context:
        return context
    if max_context == 0:
        return context[:0]
    return context[-max_context:]


def entropy_bits(d: TokenDistribution) -> float:
    """Shannon entropy of ``d`` in bits, with 0*log2(0) taken as 0."""
    p = d.probs
    nz = p[p > 0.0]
    h = float(-(nz * np.log2(nz)).sum())
    # fp noise can leave a tiny negative for near-point masses
    return max(h, 0.0)


def self_information_bits(d: TokenDistribution, token_id: int) -> float:
    """Ideal code length -log2 p(token); +inf when the token has no mass."""
    if not 0 <= token_id < d.size:
        raise IndexError(f"token id {token_id} outside 0..{d.size - 1}")
    p = d[token_id]
    if p == 0.0:
        return math.inf
    return -math.log2(p)


def phrase_entropy_bits(
    lm: CausalLM, context: Sequence[int], phrase: Sequence[int]
) -> float:
    """Sum of per-token conditional entropies across ``phrase``.

    Position j is scored from the realized prefix ``context + phrase[:j]``
    (left-truncated to the model's window), so the total is additive over
    phrase concatenation.  An empty phrase scores 0.
    """
    context = list(context)
    total = 0.0
    for j in range(len(phrase)):
        ctx = truncate_context(context + list(phrase[:j]), lm.max_context)
        total += entropy_bits(lm.next_distribution(ctx))
    return total
