"""Entropy-ranked keyphrase extraction.

Pipeline: segment the document into candidate phrases, score each phrase
by the sum of per-token conditional entropies over its model-token range,
optionally collapse duplicate surface forms, then select either the top-k
phrases or the smallest set whose summed score exceeds a bit threshold.

Scores are static: each position is scored against the realized prefix of
the original document, and selection never re-conditions on previously
selected phrases.  Output surfaces are raw document slices.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, Sequence

from .dump import PrecomputedLM, fetch_remote
from .errors import ConfigError, DataError
from .lm import entropy_bits
from .ngram import NGramModel
from .segment import (
    DEFAULT_POS_PATTERN,
    Phrase,
    PosPattern,
    align_phrases,
    chunk_by_stopwords,
    load_default_stopwords,
    match_pos_pattern,
    tag_tokens,
    tokenize_full,
    tokenize_words,
)
from .stem import normalize_phrase


@dataclass(frozen=True)
class ScoredPhrase:
    phrase: Phrase
    entropy_bits: float
    doc_position: int
    token_range: tuple[int, int] | None = None  # model-token half-open range

    def __post_init__(self):
        if self.entropy_bits < 0:
            raise ValueError("phrase entropy must be non-negative")


@dataclass(frozen=True)
class ExtractionConfig:
    """Selection and segmentation knobs.

    Exactly one of ``k`` / ``tau_bits`` must be set.  ``dedup`` collapses
    repeated normalized surface forms (keep it off for compression use,
    where positional phrases matter).
    """

    k: int | None = None
    tau_bits: float | None = None
    segmenter: str = "stopwords"  # or "pos"
    dedup: bool = True
    normalize: bool = True  # lowercase+stem forms for dedup keys
    stopwords: frozenset[str] | None = None
    pos_pattern: PosPattern = DEFAULT_POS_PATTERN

    def __post_init__(self):
        if (self.k is None) == (self.tau_bits is None):
            raise ConfigError("exactly one of k and tau_bits must be set")
        if self.k is not None and self.k < 0:
            raise ConfigError(f"k must be >= 0, got {self.k}")
        if self.tau_bits is not None and self.tau_bits < 0:
            raise ConfigError(f"tau_bits must be >= 0, got {self.tau_bits}")
        if self.segmenter not in ("stopwords", "pos"):
            raise ConfigError(f"unknown segmenter {self.segmenter!r}")


@dataclass(frozen=True)
class DocumentAnalysis:
    """Per-position view of one document under some backend: model-token
    byte spans plus the conditional entropy at each position."""

    token_spans: tuple[tuple[int, int], ...]
    entropy_bits: tuple[float, ...]

    def __post_init__(self):
        if len(self.token_spans) != len(self.entropy_bits):
            raise DataError("token_spans and entropy_bits must align")


class ScoringBackend(Protocol):
    def analyze(self, doc_id: str, text: str) -> DocumentAnalysis: ...


class NgramTextBackend:
    """Score documents with a trained n-gram model over full-cover tokens.

    The same tokenization must have been used for training; tokens missing
    from the model vocabulary are a data error.
    """

    def __init__(self, model: NGramModel):
        self.model = model

    def token_ids(self, text: str) -> tuple[list[int], list[tuple[int, int]]]:
        tokens = tokenize_full(text)
        vocab = self.model.vocab
        ids, spans, unknown = [], [], []
        for tok in tokens:
            if tok.surface in vocab:
                ids.append(vocab.id_of(tok.surface))
                spans.append(tok.char_span)
            else:
                unknown.append(tok.surface)
        if unknown:
            uniq = sorted(set(unknown))[:10]
            raise DataError(f"document contains tokens outside the model vocabulary: {uniq}")
        return ids, spans

    def analyze(self, doc_id: str, text: str) -> DocumentAnalysis:
        ids, spans = self.token_ids(text)
        entropies = [
            entropy_bits(self.model.next_distribution(ids[:i])) for i in range(len(ids))
        ]
        return DocumentAnalysis(token_spans=tuple(spans), entropy_bits=tuple(entropies))


class DumpBackend:
    """Score documents from precomputed per-position entropies."""

    def __init__(self, precomputed: PrecomputedLM):
        self.precomputed = precomputed

    def analyze(self, doc_id: str, text: str) -> DocumentAnalysis:
        try:
            record = self.precomputed.record(doc_id)
        except KeyError:
            raise DataError(f"dump has no record for doc_id {doc_id!r}") from None
        return DocumentAnalysis(
            token_spans=record.char_spans, entropy_bits=record.entropy_bits
        )


class RemoteBackend:
    """Score documents through the /v1/analyze wire protocol."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def analyze(self, doc_id: str, text: str) -> DocumentAnalysis:
        record = fetch_remote(self.endpoint, text, doc_id=doc_id, timeout=self.timeout)
        return DocumentAnalysis(
            token_spans=record.char_spans, entropy_bits=record.entropy_bits
        )


def _as_backend(backend) -> "ScoringBackend":
    """Accept a raw model or precomputed map in place of an adapter."""
    if isinstance(backend, NGramModel):
        return NgramTextBackend(backend)
    if isinstance(backend, PrecomputedLM):
        return DumpBackend(backend)
    return backend


def segment(text: str, config: ExtractionConfig) -> list[Phrase]:
    tokens = tokenize_words(text)
    if config.segmenter == "stopwords":
        stopwords = config.stopwords
        if stopwords is None:
            stopwords = load_default_stopwords()
        return chunk_by_stopwords(text, tokens, stopwords)
    tagged = tag_tokens(tokens)
    return match_pos_pattern(text, tagged, config.pos_pattern)


def score_phrases(
    backend: ScoringBackend, doc_id: str, text: str, phrases: Sequence[Phrase]
) -> list[ScoredPhrase]:
    """One entropy score per phrase: the sum over its model-token range.

    Each position's entropy depends only on tokens strictly before it, so
    appending text never changes the score of an earlier phrase.
    """
    analysis = _as_backend(backend).analyze(doc_id, text)
    ranges = align_phrases(phrases, analysis.token_spans)
    out = []
    for position, (phrase, (lo, hi)) in enumerate(zip(phrases, ranges)):
        score = sum(analysis.entropy_bits[lo:hi])
        out.append(
            ScoredPhrase(
                phrase=phrase,
                entropy_bits=score,
                doc_position=position,
                token_range=(lo, hi),
            )
        )
    return out


def _rank_order(scored: Sequence[ScoredPhrase]) -> list[int]:
    """Indices sorted by descending entropy, then earlier position."""
    return sorted(range(len(scored)), key=lambda i: (-scored[i].entropy_bits, scored[i].doc_position))


def select_top_k(scored: Sequence[ScoredPhrase], k: int) -> list[int]:
    """The min(k, n) indices maximizing summed entropy, in rank order.

    Ties break toward earlier document position, so the result equals the
    first k elements of the stable descending sort.
    """
    if k < 0:
        raise ConfigError(f"k must be >= 0, got {k}")
    return _rank_order(scored)[: min(k, len(scored))]


@dataclass(frozen=True)
class ThresholdSelection:
    indices: tuple[int, ...]
    threshold_met: bool


def select_by_threshold(scored: Sequence[ScoredPhrase], tau_bits: float) -> ThresholdSelection:
    """Smallest prefix of the ranking whose summed entropy exceeds tau.

    When even the full set does not exceed tau, all phrases are returned
    with ``threshold_met`` False.
    """
    if tau_bits < 0:
        raise ConfigError(f"tau_bits must be >= 0, got {tau_bits}")
    order = _rank_order(scored)
    cumulative = 0.0
    taken: list[int] = []
    for idx in order:
        taken.append(idx)
        cumulative += scored[idx].entropy_bits
        if cumulative > tau_bits:
            return ThresholdSelection(tuple(taken), True)
    return ThresholdSelection(tuple(taken), False)


def dedup_normalized(scored: Sequence[ScoredPhrase], normalize: bool = True) -> list[ScoredPhrase]:
    """Keep one occurrence per normalized surface form: the highest-entropy
    one, earliest position on ties.  Document order is preserved."""
    best: dict[str, ScoredPhrase] = {}
    for sp in scored:
        key = normalize_phrase(sp.phrase.surface) if normalize else sp.phrase.surface
        cur = best.get(key)
        if cur is None or sp.entropy_bits > cur.entropy_bits:
            best[key] = sp
    keep = {id(sp) for sp in best.values()}
    return [sp for sp in scored if id(sp) in keep]


@dataclass(frozen=True)
class ExtractionResult:
    ranked: tuple[ScoredPhrase, ...]
    threshold_met: bool = True

    @property
    def keyphrases(self) -> list[str]:
        return [sp.phrase.surface for sp in self.ranked]


def extract(
    text: str,
    config: ExtractionConfig,
    backend: ScoringBackend,
    doc_id: str = "doc",
) -> ExtractionResult:
    """Segment, score, optionally dedup, then select. Deterministic."""
    backend = _as_backend(backend)
    phrases = segment(text, config)
    scored = score_phrases(backend, doc_id, text, phrases)
    if config.dedup:
        scored = dedup_normalized(scored, normalize=config.normalize)
    if config.k is not None:
        chosen = select_top_k(scored, config.k)
        return ExtractionResult(ranked=tuple(scored[i] for i in chosen))
    selection = select_by_threshold(scored, config.tau_bits)
    return ExtractionResult(
        ranked=tuple(scored[i] for i in selection.indices),
        threshold_met=selection.threshold_met,
    )
