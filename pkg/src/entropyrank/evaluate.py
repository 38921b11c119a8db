"""Benchmark harness: datasets, matching metrics, and report aggregation.

Predicted and gold phrases are compared on normalized forms (lowercase,
per-word Porter stem, collapsed whitespace).  Precision/recall/F1 are
computed at each cutoff k and macro-averaged over documents; ROUGE-1 is
the clipped-unigram F-measure between the concatenated predicted and gold
phrases.  Report values are percentages, in [0, 100].
"""

from __future__ import annotations

import json
import os
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import DataError, ParseError, ValidationError
from .stem import normalize_phrase, porter_stem

__all__ = [
    "LabeledDocument",
    "MetricsReport",
    "porter_stem",
    "normalize_phrase",
    "prf_at_k",
    "rouge1",
    "jaccard",
    "run_benchmark",
    "load_dataset",
    "save_dataset",
]


@dataclass(frozen=True)
class LabeledDocument:
    doc_id: str
    text: str
    gold_keyphrases: tuple[str, ...]

    def __post_init__(self):
        if not self.text:
            raise ValidationError(f"document {self.doc_id!r} has empty text")


def _normalized_unique(phrases: Iterable[str]) -> list[str]:
    """Normalized forms, first occurrence kept, empties dropped."""
    seen = []
    for phrase in phrases:
        norm = normalize_phrase(phrase)
        if norm and norm not in seen:
            seen.append(norm)
    return seen


def _top_k_raw(phrases: Sequence[str], k: int) -> list[str]:
    """Raw surfaces of the first k predictions with distinct normalized
    forms: the same cutoff prf_at_k applies, but unstemmed (the stemmer is
    not idempotent, so ROUGE must normalize raw text exactly once)."""
    seen: list[str] = []
    raw: list[str] = []
    for phrase in phrases:
        norm = normalize_phrase(phrase)
        if norm and norm not in seen:
            seen.append(norm)
            raw.append(phrase)
            if len(raw) == k:
                break
    return raw


def prf_at_k(
    predicted: Sequence[str], gold: Iterable[str], k: int
) -> tuple[float, float, float]:
    """Precision, recall, F1 of the top-k predictions against the gold set.

    Duplicate predictions (same normalized form) beyond the first do not
    count; precision divides by min(k, number of distinct predictions).
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    gold_set = set(_normalized_unique(gold))
    if not gold_set:
        raise DataError("gold keyphrase set is empty")
    pred = _normalized_unique(predicted)[:k]
    if not pred:
        return (0.0, 0.0, 0.0)
    matches = sum(1 for p in pred if p in gold_set)
    precision = matches / len(pred)
    recall = matches / len(gold_set)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return (precision, recall, f1)


def _concat_words(phrases: Iterable[str]) -> list[str]:
    words = []
    for phrase in phrases:
        words.extend(porter_stem(w) for w in phrase.lower().split())
    return words


def rouge1(predicted: Iterable[str], gold: Iterable[str]) -> float:
    """Clipped unigram-overlap F-measure between the two concatenations."""
    pred_words = _concat_words(predicted)
    gold_words = _concat_words(gold)
    if not pred_words and not gold_words:
        warnings.warn("rouge1 called with two empty phrase lists", stacklevel=2)
        return 0.0
    if not pred_words or not gold_words:
        return 0.0
    overlap = sum((Counter(pred_words) & Counter(gold_words)).values())
    precision = overlap / len(pred_words)
    recall = overlap / len(gold_words)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def jaccard(phrases_a: Iterable[str], phrases_b: Iterable[str]) -> float:
    """|A ∩ B| / |A ∪ B| over normalized phrase sets; 0 when both empty."""
    a = set(_normalized_unique(phrases_a))
    b = set(_normalized_unique(phrases_b))
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)


@dataclass(frozen=True)
class KMetrics:
    precision: float
    recall: float
    f1: float
    rouge1: float


@dataclass(frozen=True)
class MetricsReport:
    per_k: dict[int, KMetrics]
    n_documents: int
    n_skipped: int

    def to_json(self) -> str:
        payload = {
            "n_documents": self.n_documents,
            "n_skipped": self.n_skipped,
            "per_k": {
                str(k): {
                    "precision": round(m.precision, 4),
                    "recall": round(m.recall, 4),
                    "f1": round(m.f1, 4),
                    "rouge1": round(m.rouge1, 4),
                }
                for k, m in sorted(self.per_k.items())
            },
        }
        return json.dumps(payload, indent=2)

    def to_table(self) -> str:
        lines = [f"documents scored: {self.n_documents} (skipped: {self.n_skipped})"]
        lines.append(f"{'k':>4}  {'P':>7}  {'R':>7}  {'F1':>7}  {'RO1':>7}")
        for k, m in sorted(self.per_k.items()):
            lines.append(
                f"{k:>4}  {m.precision:>7.2f}  {m.recall:>7.2f}  {m.f1:>7.2f}  {m.rouge1:>7.2f}"
            )
        return "\n".join(lines)


def run_benchmark(
    dataset: Sequence[LabeledDocument],
    results: Mapping[str, Sequence[str]],
    k_values: Sequence[int],
) -> MetricsReport:
    """Macro-average per-document metrics at each cutoff.

    Every document with a non-empty gold set must have an extraction
    result; documents with empty gold are skipped with a warning.
    """
    scorable = [doc for doc in dataset if doc.gold_keyphrases]
    skipped = len(dataset) - len(scorable)
    if skipped:
        warnings.warn(f"skipping {skipped} documents with empty gold sets", stacklevel=2)
    missing = [doc.doc_id for doc in scorable if doc.doc_id not in results]
    if missing:
        raise DataError(f"no extraction result for documents: {missing}")
    if not scorable:
        raise DataError("no scorable documents in the dataset")
    per_k = {}
    for k in k_values:
        p_sum = r_sum = f_sum = ro_sum = 0.0
        for doc in scorable:
            predicted = list(results[doc.doc_id])
            p, r, f1 = prf_at_k(predicted, doc.gold_keyphrases, k)
            ro = rouge1(_top_k_raw(predicted, k), doc.gold_keyphrases)
            p_sum += p
            r_sum += r
            f_sum += f1
            ro_sum += ro
        n = len(scorable)
        per_k[k] = KMetrics(
            precision=100.0 * p_sum / n,
            recall=100.0 * r_sum / n,
            f1=100.0 * f_sum / n,
            rouge1=100.0 * ro_sum / n,
        )
    return MetricsReport(per_k=per_k, n_documents=len(scorable), n_skipped=skipped)


# -- datasets ----------------------------------------------------------------


def load_dataset(path) -> list[LabeledDocument]:
    """Load labeled documents.

    Accepts either the canonical line-delimited JSON file
    ({"doc_id", "text", "gold"} per line) or a benchmark directory with
    one ``<name>.txt`` per document and gold labels in ``<name>.key``
    (searched in the directory itself or in docsutf8/ + keys/ children).
    """
    path = os.fspath(path)
    if os.path.isdir(path):
        return _load_txt_key_dir(path)
    docs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                docs.append(
                    LabeledDocument(
                        doc_id=str(obj["doc_id"]),
                        text=str(obj["text"]),
                        gold_keyphrases=tuple(str(g) for g in obj["gold"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad dataset record: {exc}", lineno) from None
    return docs


def _load_txt_key_dir(root: str) -> list[LabeledDocument]:
    docs_dir, keys_dir = root, root
    for candidate in ("docsutf8", "docs", "texts"):
        if os.path.isdir(os.path.join(root, candidate)):
            docs_dir = os.path.join(root, candidate)
            break
    if os.path.isdir(os.path.join(root, "keys")):
        keys_dir = os.path.join(root, "keys")
    docs = []
    names = sorted(n for n in os.listdir(docs_dir) if n.endswith(".txt"))
    if not names:
        raise DataError(f"no .txt documents found under {docs_dir}")
    for name in names:
        stem_name = name[: -len(".txt")]
        key_path = os.path.join(keys_dir, stem_name + ".key")
        if not os.path.exists(key_path):
            raise DataError(f"missing gold file for {name}: {key_path}")
        with open(os.path.join(docs_dir, name), "r", encoding="utf-8") as fh:
            text = fh.read()
        with open(key_path, "r", encoding="utf-8") as fh:
            gold = tuple(line.strip() for line in fh if line.strip())
        docs.append(LabeledDocument(doc_id=stem_name, text=text, gold_keyphrases=gold))
    return docs


def save_dataset(docs: Iterable[LabeledDocument], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            fh.write(
                json.dumps(
                    {"doc_id": doc.doc_id, "text": doc.text, "gold": list(doc.gold_keyphrases)},
                    ensure_ascii=False,
                )
                + "\n"
            )
