"""Arithmetic coding driven by a causal LM, with phrase side information.

Tokens inside a side-information range contribute no bits to the payload
but still extend the conditioning context, so both encoder and decoder see
identical model states.  Everything else is coded against the quantized
next-token distribution.

The coder is a 64-bit-state binary arithmetic coder with the standard
underflow renormalization and a one-bit termination; combined with the
out-of-band token count this is unambiguous to decode, and payload length
never exceeds the quantized ideal code length by more than 2 bits.

Quantization maps probabilities onto integer counts summing to 2**16
(2**24 via the ``total`` argument for very large vocabularies): floor
rounding with a floor of 1 count per token, then largest-remainder
correction, fully deterministic.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dump import PrecomputedLM
from .errors import ConfigError, DecodeError, FormatError, ValidationError
from .lm import CausalLM, TokenDistribution, truncate_context

DEFAULT_TOTAL = 1 << 16
LARGE_TOTAL = 1 << 24

_STATE_BITS = 64
_MAX_RANGE = 1 << _STATE_BITS
_MASK = _MAX_RANGE - 1
_TOP = _MAX_RANGE >> 1
_SECOND = _TOP >> 1


@dataclass(frozen=True)
class QuantizedCDF:
    """Integer cumulative distribution: counts >= 1 per token, cum[-1] = total."""

    counts: np.ndarray
    cum: np.ndarray
    total: int

    def prob(self, token_id: int) -> float:
        return int(self.counts[token_id]) / self.total

    def self_information_bits(self, token_id: int) -> float:
        return -math.log2(self.prob(token_id))


def quantize(d: TokenDistribution, total: int = DEFAULT_TOTAL) -> QuantizedCDF:
    """Deterministic fixed-point quantization of a distribution.

    Counts are proportional to probabilities with a floor of one count per
    token; the largest remainders absorb the rounding difference.
    """
    V = d.size
    if V >= total:
        raise ConfigError(
            f"vocabulary of {V} needs a larger quantization total than {total}; "
            f"pass total={LARGE_TOTAL}"
        )
    raw = d.probs * total
    counts = np.floor(raw).astype(np.int64)
    remainders = raw - counts
    counts = np.maximum(counts, 1)
    diff = int(total - counts.sum())
    if diff > 0:
        # hand out surplus to the largest remainders, lowest index first
        order = np.lexsort((np.arange(V), -remainders))
        whole, extra = divmod(diff, V)
        if whole:
            counts += whole
        counts[order[:extra]] += 1
    elif diff < 0:
        # the floor of 1 overshot: reclaim from the largest counts
        need = -diff
        order = np.lexsort((np.arange(V), -counts))
        for idx in order:
            take = min(int(counts[idx]) - 1, need)
            counts[idx] -= take
            need -= take
            if need == 0:
                break
        if need:
            raise ConfigError(f"cannot quantize {V} tokens into a total of {total}")
    cum = np.zeros(V + 1, dtype=np.int64)
    np.cumsum(counts, out=cum[1:])
    return QuantizedCDF(counts=counts, cum=cum, total=total)


@lru_cache(maxsize=4096)
def _quantize_cached(d: TokenDistribution, total: int) -> QuantizedCDF:
    # TokenDistribution hashes by identity; backends memoize their
    # distributions, so repeated contexts hit this cache.
    return quantize(d, total)


@dataclass(frozen=True)
class SideInfo:
    """Phrases shared out of band: (start position, token ids) per phrase.

    Ranges must be disjoint, in bounds, and consistent with the document.
    """

    phrases: tuple[tuple[int, tuple[int, ...]], ...] = ()

    @classmethod
    def from_ranges(
        cls, tokens: Sequence[int], ranges: Sequence[tuple[int, int]]
    ) -> "SideInfo":
        phrases = tuple(
            (lo, tuple(tokens[lo:hi])) for lo, hi in sorted(ranges) if hi > lo
        )
        return cls(phrases=phrases)

    def validate(self, tokens: Sequence[int]) -> None:
        prev_end = 0
        for start, phrase in sorted(self.phrases):
            end = start + len(phrase)
            if start < prev_end:
                raise ValidationError("side-information ranges overlap")
            if start < 0 or end > len(tokens):
                raise ValidationError(
                    f"side-information range [{start}, {end}) outside document "
                    f"of {len(tokens)} tokens"
                )
            if tuple(tokens[start:end]) != phrase:
                raise ValidationError(
                    f"side-information tokens at position {start} do not match the document"
                )
            prev_end = end

    def token_at(self) -> dict[int, int]:
        """Position -> token id for every covered position."""
        covered = {}
        for start, phrase in self.phrases:
            for offset, token in enumerate(phrase):
                covered[start + offset] = token
        return covered

    @property
    def n_tokens(self) -> int:
        return sum(len(phrase) for _, phrase in self.phrases)


@dataclass(frozen=True)
class Bitstream:
    data: bytes
    bit_length: int

    def __post_init__(self):
        if self.bit_length < 0 or len(self.data) != (self.bit_length + 7) // 8:
            raise ValidationError("bitstream length does not match its payload")


class _BitWriter:
    def __init__(self):
        self._chunks = bytearray()
        self._current = 0
        self._filled = 0
        self.bit_count = 0

    def write(self, bit: int) -> None:
        self._current = (self._current << 1) | bit
        self._filled += 1
        self.bit_count += 1
        if self._filled == 8:
            self._chunks.append(self._current)
            self._current = 0
            self._filled = 0

    def getvalue(self) -> Bitstream:
        data = bytes(self._chunks)
        if self._filled:
            data += bytes([self._current << (8 - self._filled)])
        return Bitstream(data=data, bit_length=self.bit_count)


class _BitReader:
    """MSB-first reader; reads past the declared end yield 0 (the implicit
    trailing zeros of the terminated stream)."""

    def __init__(self, stream: Bitstream):
        self._data = stream.data
        self._length = stream.bit_length
        self._pos = 0

    def read(self) -> int:
        if self._pos >= self._length:
            return 0
        byte = self._data[self._pos >> 3]
        bit = (byte >> (7 - (self._pos & 7))) & 1
        self._pos += 1
        return bit


class _ArithmeticEncoder:
    def __init__(self, writer: _BitWriter):
        self.low = 0
        self.high = _MASK
        self.pending = 0
        self.writer = writer

    def encode(self, cdf: QuantizedCDF, symbol: int) -> None:
        span = self.high - self.low + 1
        total = cdf.total
        sym_lo = int(cdf.cum[symbol])
        sym_hi = int(cdf.cum[symbol + 1])
        self.high = self.low + sym_hi * span // total - 1
        self.low = self.low + sym_lo * span // total
        self._renormalize()

    def _emit(self, bit: int) -> None:
        self.writer.write(bit)
        while self.pending:
            self.writer.write(bit ^ 1)
            self.pending -= 1

    def _renormalize(self) -> None:
        while True:
            if (self.low ^ self.high) & _TOP == 0:
                self._emit(self.low >> (_STATE_BITS - 1))
                self.low = (self.low << 1) & _MASK
                self.high = ((self.high << 1) & _MASK) | 1
            elif self.low & ~self.high & _SECOND:
                self.pending += 1
                self.low = (self.low << 1) & (_MASK >> 1)
                self.high = ((self.high << 1) & (_MASK >> 1)) | _TOP | 1
            else:
                return

    def finish(self) -> None:
        # one bit pins a value inside [low, high]: low < HALF <= high here
        self._emit(1)


class _ArithmeticDecoder:
    def __init__(self, reader: _BitReader):
        self.low = 0
        self.high = _MASK
        self.reader = reader
        self.code = 0
        for _ in range(_STATE_BITS):
            self.code = (self.code << 1) | reader.read()

    def decode(self, cdf: QuantizedCDF) -> int:
        span = self.high - self.low + 1
        total = cdf.total
        offset = self.code - self.low
        value = ((offset + 1) * total - 1) // span
        symbol = int(np.searchsorted(cdf.cum, value, side="right")) - 1
        sym_lo = int(cdf.cum[symbol])
        sym_hi = int(cdf.cum[symbol + 1])
        self.high = self.low + sym_hi * span // total - 1
        self.low = self.low + sym_lo * span // total
        self._renormalize()
        return symbol

    def _renormalize(self) -> None:
        while True:
            if (self.low ^ self.high) & _TOP == 0:
                pass
            elif self.low & ~self.high & _SECOND:
                self.code = (
                    (self.code & _TOP)
                    | ((self.code << 1) & (_MASK >> 1))
                    | self.reader.read()
                )
                self.low = (self.low << 1) & (_MASK >> 1)
                self.high = ((self.high << 1) & (_MASK >> 1)) | _TOP | 1
                continue
            else:
                return
            self.code = ((self.code << 1) & _MASK) | self.reader.read()
            self.low = (self.low << 1) & _MASK
            self.high = ((self.high << 1) & _MASK) | 1


def _context_distribution(lm: CausalLM, tokens: Sequence[int], i: int) -> TokenDistribution:
    ctx = truncate_context(tokens[:i], lm.max_context)
    return lm.next_distribution(ctx)


def encode(
    lm: CausalLM,
    tokens: Sequence[int],
    side: SideInfo | None = None,
    total: int = DEFAULT_TOTAL,
) -> Bitstream:
    """Arithmetic-code the document, skipping side-information positions.

    Skipped positions still extend the context; the decoder re-inserts
    them, so the payload stays decodable with the token count known.
    """
    side = side or SideInfo()
    side.validate(tokens)
    covered = side.token_at()
    tokens = list(tokens)
    writer = _BitWriter()
    enc = _ArithmeticEncoder(writer)
    for i, token in enumerate(tokens):
        if i in covered:
            continue
        cdf = _quantize_cached(_context_distribution(lm, tokens, i), total)
        if token < 0 or token >= cdf.counts.size:
            raise ValidationError(f"token id {token} outside vocabulary")
        enc.encode(cdf, token)
    enc.finish()
    return writer.getvalue()


def decode(
    lm: CausalLM,
    bits: Bitstream,
    n_tokens: int,
    side: SideInfo | None = None,
    total: int = DEFAULT_TOTAL,
) -> list[int]:
    """Reconstruct exactly the token sequence given to encode."""
    side = side or SideInfo()
    covered = side.token_at()
    for pos in covered:
        if pos >= n_tokens:
            raise DecodeError(f"side information at position {pos} outside {n_tokens} tokens")
    dec = _ArithmeticDecoder(_BitReader(bits))
    out: list[int] = []
    for i in range(n_tokens):
        if i in covered:
            out.append(covered[i])
            continue
        cdf = _quantize_cached(_context_distribution(lm, out, i), total)
        out.append(dec.decode(cdf))
    return out


def ideal_code_length_bits(
    lm: CausalLM | PrecomputedLM,
    tokens: Sequence[int],
    side: SideInfo | None = None,
    total: int = DEFAULT_TOTAL,
    doc_id: str | None = None,
) -> float:
    """Sum of -log2 p_quantized(token | prefix) over non-side positions.

    With a PrecomputedLM backend the stored (unquantized) logprobs are
    used instead, since no distribution is available to quantize.
    """
    side = side or SideInfo()
    covered = side.token_at()
    if isinstance(lm, PrecomputedLM):
        if doc_id is None:
            raise ConfigError("doc_id is required with a precomputed backend")
        record = lm.record(doc_id)
        if covered and max(covered) >= len(record.logprob_bits):
            raise ValidationError(
                f"side information extends past the {len(record.logprob_bits)} "
                f"recorded positions of {doc_id!r}"
            )
        return -sum(
            lp for i, lp in enumerate(record.logprob_bits) if i not in covered
        )
    side.validate(tokens)
    length = 0.0
    for i, token in enumerate(tokens):
        if i in covered:
            continue
        cdf = _quantize_cached(_context_distribution(lm, tokens, i), total)
        length += cdf.self_information_bits(token)
    return length


def remaining_entropy_curve(
    scored_bits: Sequence[float], word_count: int, k_max: int
) -> list[tuple[int, float]]:
    """(k, remaining bits per word) for k = 0..k_max.

    Remaining entropy after k phrases is the total phrase entropy minus
    the top-k sum, normalized by the document's whitespace word count.
    """
    if k_max > len(scored_bits):
        raise ConfigError(f"k_max={k_max} exceeds {len(scored_bits)} phrases")
    if word_count <= 0:
        raise ConfigError("word_count must be positive")
    ranked = sorted(scored_bits, reverse=True)
    total = sum(ranked)
    curve = []
    removed = 0.0
    for k in range(k_max + 1):
        if k > 0:
            removed += ranked[k - 1]
        curve.append((k, max(total - removed, 0.0) / word_count))
    return curve


# -- container format --------------------------------------------------------

MAGIC = b"ENTR1"


def pack_container(
    model_id: str, n_tokens: int, side: SideInfo, bits: Bitstream
) -> bytes:
    """Self-describing compressed document: magic, model hash, token count,
    side-information block, then the payload with its declared bit length.
    All integers big-endian; payload bits MSB-first, zero-padded to bytes."""
    out = bytearray()
    out += MAGIC
    out += hashlib.sha256(model_id.encode("utf-8")).digest()
    out += struct.pack(">Q", n_tokens)
    out += struct.pack(">I", len(side.phrases))
    for start, phrase in side.phrases:
        out += struct.pack(">II", start, len(phrase))
        out += struct.pack(f">{len(phrase)}I", *phrase) if phrase else b""
    out += struct.pack(">Q", bits.bit_length)
    out += bits.data
    return bytes(out)


def unpack_container(blob: bytes) -> tuple[bytes, int, SideInfo, Bitstream]:
    """Returns (model hash digest, n_tokens, side info, payload)."""
    if blob[: len(MAGIC)] != MAGIC:
        raise FormatError("bad container magic; not a compressed document")
    pos = len(MAGIC)

    def take(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(blob):
            raise FormatError("container truncated")
        chunk = blob[pos : pos + n]
        pos += n
        return chunk

    model_hash = take(32)
    (n_tokens,) = struct.unpack(">Q", take(8))
    (n_phrases,) = struct.unpack(">I", take(4))
    phrases = []
    for _ in range(n_phrases):
        start, length = struct.unpack(">II", take(8))
        tokens = struct.unpack(f">{length}I", take(4 * length)) if length else ()
        phrases.append((start, tuple(tokens)))
    (bit_length,) = struct.unpack(">Q", take(8))
    payload = take((bit_length + 7) // 8)
    if pos != len(blob):
        raise FormatError(f"{len(blob) - pos} trailing bytes after container payload")
    return (
        model_hash,
        n_tokens,
        SideInfo(phrases=tuple(phrases)),
        Bitstream(data=payload, bit_length=bit_length),
    )


def verify_model_hash(container_hash: bytes, model_id: str) -> None:
    if hashlib.sha256(model_id.encode("utf-8")).digest() != container_hash:
        raise FormatError(
            "container was produced with a different model than the one supplied"
        )
