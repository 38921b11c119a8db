"""Precomputed per-position entropy/logprob records and their transports.

A dump record carries, for one document, the model tokenization (surfaces
plus byte spans into the source text) together with the per-position
conditional entropy and the realized token's log-probability, both in
bits.  Records travel either as line-delimited JSON files or over a small
HTTP wire protocol (POST /v1/analyze).

This backend serves extraction and ideal-code-length accounting; it does
not carry full distributions, so actual arithmetic coding needs a
full-distribution model instead.

Serialization is canonical: fixed key order, floats at 9 significant
digits, so that load followed by re-serialize is byte-identical.
"""

from __future__ import annotations

import json
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import (
    ParseError,
    RemoteNetworkError,
    RemoteSchemaError,
    RemoteStatusError,
    ValidationError,
)

_FIELDS = ("doc_id", "tokens", "char_spans", "entropy_bits", "logprob_bits")


def format_float(x: float) -> str:
    """Canonical 9-significant-digit rendering used in dumps and results."""
    s = "%.9g" % float(x)
    return "0" if s == "-0" else s


@dataclass(frozen=True)
class DumpRecord:
    """Per-token analysis of one document.

    ``char_spans`` are (start, end) byte offsets into the UTF-8 source
    text: strictly increasing, non-overlapping, gaps allowed (whitespace).
    """

    doc_id: str
    tokens: tuple[str, ...]
    char_spans: tuple[tuple[int, int], ...]
    entropy_bits: tuple[float, ...]
    logprob_bits: tuple[float, ...]

    def __post_init__(self):
        n = len(self.tokens)
        for name in ("char_spans", "entropy_bits", "logprob_bits"):
            if len(getattr(self, name)) != n:
                raise ValidationError(
                    f"record {self.doc_id!r}: field {name} has length "
                    f"{len(getattr(self, name))}, expected {n} (one per token)"
                )
        prev_end = 0
        for i, (start, end) in enumerate(self.char_spans):
            if not end > start:
                raise ValidationError(
                    f"record {self.doc_id!r}: field char_spans[{i}] is empty or inverted"
                )
            if start < prev_end:
                raise ValidationError(
                    f"record {self.doc_id!r}: field char_spans[{i}] overlaps its predecessor"
                )
            prev_end = end
        for i, h in enumerate(self.entropy_bits):
            if not h >= 0:
                raise ValidationError(
                    f"record {self.doc_id!r}: field entropy_bits[{i}] = {h} is negative"
                )
        for i, lp in enumerate(self.logprob_bits):
            if not lp <= 0:
                raise ValidationError(
                    f"record {self.doc_id!r}: field logprob_bits[{i}] = {lp} is positive"
                )

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

    @classmethod
    def from_obj(cls, obj) -> "DumpRecord":
        if not isinstance(obj, dict):
            raise ValidationError(f"record must be an object, got {type(obj).__name__}")
        missing = [f for f in _FIELDS if f not in obj]
        if missing:
            raise ValidationError(f"record missing fields: {', '.join(missing)}")
        try:
            spans = tuple((int(s), int(e)) for s, e in obj["char_spans"])
        except (TypeError, ValueError):
            raise ValidationError("field char_spans must be a list of [start, end] pairs") from None
        try:
            return cls(
                doc_id=str(obj["doc_id"]),
                tokens=tuple(str(t) for t in obj["tokens"]),
                char_spans=spans,
                entropy_bits=tuple(float(x) for x in obj["entropy_bits"]),
                logprob_bits=tuple(float(x) for x in obj["logprob_bits"]),
            )
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"record field has wrong type: {exc}") from None


class PrecomputedLM:
    """Map doc_id -> DumpRecord; lookup is total over loaded ids."""

    def __init__(self, records: Iterable[DumpRecord] | Mapping[str, DumpRecord] = ()):
        if isinstance(records, Mapping):
            records = records.values()
        self._records: dict[str, DumpRecord] = {}
        for record in records:
            self.add(record)

    def add(self, record: DumpRecord) -> None:
        if record.doc_id in self._records:
            raise ValidationError(f"duplicate doc_id {record.doc_id!r}")
        self._records[record.doc_id] = record

    def record(self, doc_id: str) -> DumpRecord:
        try:
            return self._records[doc_id]
        except KeyError:
            raise KeyError(f"doc_id {doc_id!r} not present in dump") from None

    def doc_ids(self) -> list[str]:
        return list(self._records)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._records

    def __len__(self) -> int:
        return len(self._records)


def load_dump(path) -> PrecomputedLM:
    """Load a line-delimited dump file, validating every record.

    Lines starting with '#' are header comments and are skipped.
    """
    lm = PrecomputedLM()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
            lm.add(DumpRecord.from_obj(obj))
    return lm


def save_dump(records: Iterable[DumpRecord], path, header_comments: Iterable[str] = ()) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for comment in header_comments:
            fh.write(f"# {comment}\n")
        for record in records:
            fh.write(record.to_json_line() + "\n")


def fetch_remote(endpoint: str, text: str, doc_id: str | None = None, timeout: float = 60.0) -> DumpRecord:
    """POST the text to ``<endpoint>/v1/analyze`` and validate the reply.

    Network failures, non-success statuses, and schema violations raise
    distinct exceptions so callers can tell transport from server trouble.
    """
    if not text:
        raise ValueError("text must be non-empty")
    url = endpoint.rstrip("/") + "/v1/analyze"
    body = {"text": text}
    if doc_id is not None:
        body["doc_id"] = doc_id
    payload = json.dumps(body).encode("utf-8")
    req = urllib.request.Request(
        url, data=payload, headers={"Content-Type": "application/json"}, method="POST"
    )
    try:
        with urllib.request.urlopen(req, timeout=timeout) as resp:
            raw = resp.read()
            status = resp.status
    except urllib.error.HTTPError as exc:
        raise RemoteStatusError(exc.code, exc.read().decode("utf-8", "replace")) from None
    except (urllib.error.URLError, OSError) as exc:
        raise RemoteNetworkError(f"cannot reach {url}: {exc}") from None
    if not 200 <= status < 300:
        raise RemoteStatusError(status, raw.decode("utf-8", "replace"))
    try:
        obj = json.loads(raw.decode("utf-8"))
        return DumpRecord.from_obj(obj)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise RemoteSchemaError(f"response is not valid JSON: {exc}") from None
    except ValidationError as exc:
        raise RemoteSchemaError(f"response violates the record schema: {exc}") from None
