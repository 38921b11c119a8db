"""Add-k-smoothed order-n language model.

Deterministic, trainable desk-scale backend: counts are explicit nested
dictionaries, every emitted distribution is strictly positive (k > 0), and
models round-trip exactly through a plain-text table format.

Training pads each sequence with n-1 BOS tokens on the left and appends
EOS, so the first position is conditioned on a well-defined context and
sequence termination is part of the model.
"""

from __future__ import annotations

import hashlib
import os
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, ParseError
from .lm import TokenDistribution, Vocabulary, self_information_bits

_DIST_CACHE_SIZE = 8192


class NGramModel:
    """Order-n model with add-k smoothing over a fixed vocabulary.

    p(t | ctx) = (count(ctx, t) + k) / (count(ctx, .) + k * V)

    Immutable after construction; concurrent queries are safe.
    """

    def __init__(
        self,
        order: int,
        k_smooth: float,
        vocab: Vocabulary,
        counts: dict[tuple[int, ...], dict[int, int]] | None = None,
    ):
        if order < 1:
            raise ConfigError(f"order must be >= 1, got {order}")
        if not k_smooth > 0:
            raise ConfigError(f"k_smooth must be > 0, got {k_smooth}")
        self.order = order
        self.k_smooth = float(k_smooth)
        self.vocab = vocab
        self.counts = counts if counts is not None else {}
        self.max_context = order - 1
        self._dist_for = lru_cache(maxsize=_DIST_CACHE_SIZE)(self._compute_distribution)

    # -- querying ---------------------------------------------------------

    def _effective_context(self, context: Sequence[int]) -> tuple[int, ...]:
        n_ctx = self.order - 1
        ctx = tuple(context[-n_ctx:]) if n_ctx > 0 else ()
        if len(ctx) < n_ctx:
            ctx = (self.vocab.bos_id,) * (n_ctx - len(ctx)) + ctx
        return ctx

    def _compute_distribution(self, ctx: tuple[int, ...]) -> TokenDistribution:
        V = self.vocab.size
        weights = np.full(V, self.k_smooth, dtype=np.float64)
        bucket = self.counts.get(ctx)
        if bucket:
            for token, count in bucket.items():
                weights[token] += count
        return TokenDistribution(weights / weights.sum())

    def next_distribution(self, context: Sequence[int]) -> TokenDistribution:
        return self._dist_for(self._effective_context(context))

    def sequence_logprob_bits(self, tokens: Sequence[int]) -> float:
        """Sum of log2 p(token_i | prefix) over the sequence (<= 0)."""
        total = 0.0
        for i, token in enumerate(tokens):
            d = self.next_distribution(tokens[:i])
            total -= self_information_bits(d, token)
        return total

    def sample(self, length: int, seed: int) -> list[int]:
        """Draw ``length`` tokens sequentially; deterministic given seed."""
        rng = np.random.default_rng(seed)
        out: list[int] = []
        for _ in range(length):
            d = self.next_distribution(out)
            cum = np.cumsum(d.probs)
            out.append(int(np.searchsorted(cum, rng.random(), side="right")))
        return out

    # -- persistence ------------------------------------------------------

    def _table_lines(self) -> list[str]:
        lines = []
        for ctx in sorted(self.counts):
            ctx_key = ",".join(str(t) for t in ctx)
            bucket = self.counts[ctx]
            for token in sorted(bucket):
                lines.append(f"{ctx_key}\t{token}\t{bucket[token]}")
        return lines

    def fingerprint(self) -> str:
        """Stable content hash covering order, smoothing, vocab, and counts."""
        h = hashlib.sha256()
        h.update(f"order={self.order} k={self.k_smooth!r}\n".encode())
        h.update(f"bos={self.vocab.bos_id} eos={self.vocab.eos_id}\n".encode())
        for surface in self.vocab.surfaces:
            h.update(surface.encode("utf-8") + b"\x00")
        for line in self._table_lines():
            h.update(line.encode("utf-8") + b"\n")
        return h.hexdigest()

    def save(self, path, vocab_path=None) -> None:
        """Write the count table; the vocabulary goes to ``vocab_path``
        (default: ``<path>.vocab``) and is referenced from the header."""
        path = os.fspath(path)
        if vocab_path is None:
            vocab_path = path + ".vocab"
        self.vocab.save(vocab_path)
        rel_vocab = os.path.relpath(vocab_path, os.path.dirname(path) or ".")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#ngram order={self.order} k_smooth={self.k_smooth!r} vocab={rel_vocab}\n")
            for line in self._table_lines():
                fh.write(line + "\n")

    @classmethod
    def load(cls, path) -> "NGramModel":
        path = os.fspath(path)
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith("#ngram "):
                raise ParseError("model header must start with '#ngram '", 1)
            fields = dict(part.split("=", 1) for part in header[len("#ngram ") :].split())
            try:
                order = int(fields["order"])
                k_smooth = float(fields["k_smooth"])
                vocab_rel = fields["vocab"]
            except (KeyError, ValueError) as exc:
                raise ParseError(f"malformed model header: {header!r}", 1) from exc
            vocab = Vocabulary.load(os.path.join(os.path.dirname(path) or ".", vocab_rel))
            counts: dict[tuple[int, ...], dict[int, int]] = {}
            for lineno, line in enumerate(fh, start=2):
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    ctx_key, token_s, count_s = line.split("\t")
                    ctx = tuple(int(t) for t in ctx_key.split(",")) if ctx_key else ()
                    token, count = int(token_s), int(count_s)
                except ValueError:
                    raise ParseError(f"malformed count row: {line!r}", lineno) from None
                counts.setdefault(ctx, {})[token] = count
        return cls(order=order, k_smooth=k_smooth, vocab=vocab, counts=counts)


def train(
    corpus: Iterable[Sequence[int]],
    order: int,
    k_smooth: float,
    vocab: Vocabulary,
) -> NGramModel:
    """Count all order-length windows, BOS-padded and EOS-terminated."""
    counts: dict[tuple[int, ...], dict[int, int]] = {}
    n_ctx = order - 1
    bos, eos = vocab.bos_id, vocab.eos_id
    n_sequences = 0
    for seq in corpus:
        n_sequences += 1
        padded = [bos] * n_ctx + list(seq) + [eos]
        for i in range(n_ctx, len(padded)):
            ctx = tuple(padded[i - n_ctx : i])
            bucket = counts.setdefault(ctx, {})
            bucket[padded[i]] = bucket.get(padded[i], 0) + 1
    if n_sequences == 0:
        raise ConfigError("training corpus is empty")
    return NGramModel(order=order, k_smooth=k_smooth, vocab=vocab, counts=counts)
