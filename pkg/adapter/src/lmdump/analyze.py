"""Run a causal transformer over documents, yielding per-token analysis.

For each position i the full next-token softmax given tokens < i is
reduced to its Shannon entropy, and the realized token's log-probability
is recorded; both in bits.  Long documents are processed with sliding
left-truncated windows.  Entropy is accumulated in float64 over the whole
vocabulary: 50k-term reductions drift visibly in lower precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch

from .records import AnalysisRecord, RecordError

DEFAULT_CHECKPOINT = "EleutherAI/gpt-neo-1.3B"
_LN2 = math.log(2.0)


class AnalysisError(RuntimeError):
    """The text cannot be analyzed (empty, or tokenizes to nothing)."""


@dataclass(frozen=True)
class AdapterConfig:
    checkpoint: str = DEFAULT_CHECKPOINT
    device: str = "cpu"
    batch_size: int = 1
    max_context: int = 1024  # window width; left-truncated stride beyond it
    window_stride: int | None = None  # default: max_context // 2

    @property
    def stride(self) -> int:
        return self.window_stride or max(self.max_context // 2, 1)


def _byte_offsets(text: str) -> list[int]:
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    return offsets


class Analyzer:
    """Bundles a loaded model + tokenizer; documents are analyzed one at a
    time (batch size only groups file IO), so results never depend on how
    requests are batched."""

    def __init__(self, model, tokenizer, config: AdapterConfig):
        if config.max_context < 2:
            raise ValueError("max_context must be at least 2")
        if not 1 <= config.stride < config.max_context:
            raise ValueError("window_stride must be in [1, max_context)")
        n_positions = getattr(model.config, "max_position_embeddings", None) or getattr(
            model.config, "n_positions", config.max_context
        )
        if config.max_context > n_positions:
            raise ValueError(
                f"max_context={config.max_context} exceeds the model limit {n_positions}"
            )
        self.model = model.eval()
        self.tokenizer = tokenizer
        self.config = config
        self.device = torch.device(config.device)
        self.model.to(self.device)

    @classmethod
    def from_pretrained(cls, config: AdapterConfig) -> "Analyzer":
        from transformers import AutoModelForCausalLM, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(config.checkpoint)
        model = AutoModelForCausalLM.from_pretrained(config.checkpoint)
        return cls(model, tokenizer, config)

    def _bos_id(self) -> int:
        for name in ("bos_token_id", "eos_token_id"):
            value = getattr(self.tokenizer, name, None)
            if value is not None:
                return int(value)
        raise AnalysisError("tokenizer defines neither BOS nor EOS to condition position 0 on")

    def _window_logprobs(self, seq: torch.Tensor) -> torch.Tensor:
        """Float64 log-softmax rows predicting seq[1:], windowed for length.

        Row t-1 is the distribution over seq[t] given its window prefix.
        Within one window the context is exact; beyond the window width,
        the usual stride recipe guarantees every prediction at least
        (width - stride) tokens of left context.
        """
        width, stride = self.config.max_context, self.config.stride
        n = seq.shape[0]
        rows = torch.empty((n - 1, self.model.config.vocab_size), dtype=torch.float64)
        covered = 0  # highest target index t already produced
        begin = 0
        while covered < n - 1:
            end = min(begin + width, n)
            with torch.no_grad():
                logits = self.model(seq[begin:end].unsqueeze(0).to(self.device)).logits[0]
            logprobs = torch.log_softmax(logits.double().cpu(), dim=-1)
            # logits row j carries the distribution over seq[begin + j + 1]
            first_t, last_t = covered + 1, end - 1
            rows[first_t - 1 : last_t] = logprobs[first_t - begin - 1 : last_t - begin]
            covered = last_t
            begin += stride
        return rows

    def analyze(self, text: str, doc_id: str = "doc") -> AnalysisRecord:
        if not text:
            raise AnalysisError("text must be non-empty")
        enc = self.tokenizer(text, return_offsets_mapping=True, add_special_tokens=False)
        ids = enc["input_ids"]
        offsets = enc["offset_mapping"]
        if not ids:
            raise AnalysisError("text tokenizes to zero tokens")
        byte_of = _byte_offsets(text)
        spans = tuple((byte_of[s], byte_of[e]) for s, e in offsets)
        surfaces = tuple(text[s:e] for s, e in offsets)

        seq = torch.tensor([self._bos_id(), *ids], dtype=torch.long)
        rows = self._window_logprobs(seq)
        entropy = []
        logprob = []
        for i, token_id in enumerate(ids):
            ls = rows[i]
            p = torch.exp(ls)
            h = float(-(p * ls).sum().item()) / _LN2
            entropy.append(max(h, 0.0))
            logprob.append(min(float(ls[token_id].item()) / _LN2, 0.0))
        try:
            return AnalysisRecord(
                doc_id=doc_id,
                tokens=surfaces,
                char_spans=spans,
                entropy_bits=tuple(entropy),
                logprob_bits=tuple(logprob),
            )
        except RecordError as exc:
            raise AnalysisError(f"tokenizer produced an invalid span layout: {exc}") from exc

    def analyze_many(self, items):
        """(doc_id, text) pairs -> records, sequentially (order preserved)."""
        return [self.analyze(text, doc_id) for doc_id, text in items]

    def header(self) -> dict[str, str]:
        return {
            "checkpoint": self.config.checkpoint,
            "max_context": str(self.config.max_context),
            "window_stride": str(self.config.stride),
        }
