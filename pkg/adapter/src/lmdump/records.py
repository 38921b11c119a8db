"""Analysis record schema and canonical serialization.

One record per document: token surfaces, byte spans into the source text,
per-position conditional entropy (bits), and the realized token's
log-probability (bits, <= 0).  The line format is shared with consumers:
fixed key order, floats at 9 significant digits, '#' lines as header
comments, so identical analyses serialize to identical bytes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable


class RecordError(ValueError):
    """A record violates the schema."""


def format_float(x: float) -> str:
    s = "%.9g" % float(x)
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class AnalysisRecord:
    doc_id: str
    tokens: tuple[str, ...]
    char_spans: tuple[tuple[int, int], ...]
    entropy_bits: tuple[float, ...]
    logprob_bits: tuple[float, ...]

    def __post_init__(self):
        n = len(self.tokens)
        for name in ("char_spans", "entropy_bits", "logprob_bits"):
            if len(getattr(self, name)) != n:
                raise RecordError(f"{name} must have one entry per token")
        prev_end = 0
        for start, end in self.char_spans:
            if end <= start or start < prev_end:
                raise RecordError("char_spans must be non-empty, ordered, non-overlapping")
            prev_end = end
        if any(h < 0 for h in self.entropy_bits):
            raise RecordError("entropy_bits must be non-negative")
        if any(lp > 0 for lp in self.logprob_bits):
            raise RecordError("logprob_bits must be non-positive")

    def to_json_line(self) -> str:
        spans = ", ".join(f"[{s}, {e}]" for s, e in self.char_spans)
        ent = ", ".join(format_float(h) for h in self.entropy_bits)
        lp = ", ".join(format_float(v) for v in self.logprob_bits)
        return (
            "{"
            f'"doc_id": {json.dumps(self.doc_id, ensure_ascii=False)}, '
            f'"tokens": {json.dumps(list(self.tokens), ensure_ascii=False)}, '
            f'"char_spans": [{spans}], '
            f'"entropy_bits": [{ent}], '
            f'"logprob_bits": [{lp}]'
            "}"
        )


def write_dump(records: Iterable[AnalysisRecord], path, header: dict[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in header.items():
            fh.write(f"# {key}={value}\n")
        for record in records:
            fh.write(record.to_json_line() + "\n")
