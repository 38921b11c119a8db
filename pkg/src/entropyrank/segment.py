"""Document segmentation: word tokens, candidate phrases, and alignment.

Two phrase strategies are supported. Stopword chunking takes maximal runs
of non-stopword word tokens; tag-pattern matching takes greedy longest
non-overlapping matches of a part-of-speech pattern such as the default
"<J.*>*<N.*>+" (zero or more adjective-class tags followed by one or more
noun-class tags).

Tags come either from caller-supplied annotations (see read_tagged) or
from the bundled lexicon tagger: closed-class function words and a set of
very common content words are listed in data/tag_lexicon.txt, unknown
capitalized words tag as NNP, and everything else defaults to NN.

All spans are byte offsets into the UTF-8 encoding of the source text.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

from .errors import AlignmentError, ConfigError, ParseError, ValidationError

# single letter or digit (unicode); underscore counts as punctuation
_WORD_RE = re.compile(r"[^\W_]", re.UNICODE)


@dataclass(frozen=True)
class WordToken:
    surface: str
    start: int  # byte offset, inclusive
    end: int  # byte offset, exclusive
    pos_tag: str | None = None

    @property
    def is_punct(self) -> bool:
        return not _WORD_RE.search(self.surface)

    @property
    def char_span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def with_tag(self, tag: str) -> "WordToken":
        return WordToken(self.surface, self.start, self.end, tag)


@dataclass(frozen=True)
class Phrase:
    """Contiguous run of word tokens; surface is the raw source slice."""

    word_range: tuple[int, int]  # half-open into the WordToken sequence
    char_span: tuple[int, int]  # byte offsets, union of member spans
    surface: str

    def __post_init__(self):
        if self.word_range[1] <= self.word_range[0]:
            raise ValidationError("phrase word_range must be non-empty")
        if self.char_span[1] <= self.char_span[0]:
            raise ValidationError("phrase char_span must be non-empty")


def _byte_offsets(text: str) -> list[int]:
    """Map str index -> byte offset of that character in UTF-8."""
    offsets = [0]
    for ch in text:
        offsets.append(offsets[-1] + len(ch.encode("utf-8")))
    return offsets


def tokenize_words(text: str) -> list[WordToken]:
    """Split text into word and punctuation tokens with byte spans.

    Maximal runs of letters/digits/apostrophes become word tokens; every
    other non-whitespace character is its own punctuation token.  Slicing
    the UTF-8 bytes at the spans (plus the uncovered gaps) reproduces the
    input exactly.
    """
    offsets = _byte_offsets(text)
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            pos += 1
            continue
        if _WORD_RE.match(ch) or ch == "'":
            end = pos
            while end < n and (_WORD_RE.match(text[end]) or text[end] == "'"):
                end += 1
        else:
            end = pos + 1
        out.append(WordToken(text[pos:end], offsets[pos], offsets[end]))
        pos = end
    return out


def _slice_by_bytes(text: str, start: int, end: int) -> str:
    return text.encode("utf-8")[start:end].decode("utf-8")


def _make_phrase(text: str, tokens: Sequence[WordToken], lo: int, hi: int) -> Phrase:
    span = (tokens[lo].start, tokens[hi - 1].end)
    return Phrase(word_range=(lo, hi), char_span=span, surface=_slice_by_bytes(text, *span))


def chunk_by_stopwords(
    text: str, tokens: Sequence[WordToken], stopwords: Iterable[str]
) -> list[Phrase]:
    """Maximal runs of tokens that are neither stopwords nor punctuation."""
    stopset = set(stopwords)
    phrases = []
    run_start = None
    for i, tok in enumerate(tokens):
        breaks = tok.is_punct or tok.surface.lower() in stopset
        if breaks:
            if run_start is not None:
                phrases.append(_make_phrase(text, tokens, run_start, i))
                run_start = None
        elif run_start is None:
            run_start = i
    if run_start is not None:
        phrases.append(_make_phrase(text, tokens, run_start, len(tokens)))
    return phrases


@dataclass(frozen=True)
class PosPattern:
    """Sequence of quantified tag-class elements, e.g. "<J.*>*<N.*>+"."""

    pattern: str
    elements: tuple[tuple[re.Pattern, str], ...]

    _ELEMENT_RE = re.compile(r"<([^<>]+)>([*+?]?)")

    @classmethod
    def parse(cls, pattern: str) -> "PosPattern":
        elements = []
        pos = 0
        for m in cls._ELEMENT_RE.finditer(pattern):
            if m.start() != pos:
                raise ConfigError(f"cannot parse tag pattern at {pattern[pos:]!r}")
            try:
                tag_re = re.compile(m.group(1))
            except re.error as exc:
                raise ConfigError(f"bad tag class {m.group(1)!r}: {exc}") from None
            elements.append((tag_re, m.group(2)))
            pos = m.end()
        if pos != len(pattern) or not elements:
            raise ConfigError(f"cannot parse tag pattern {pattern!r}")
        return cls(pattern=pattern, elements=tuple(elements))


DEFAULT_POS_PATTERN = PosPattern.parse("<J.*>*<N.*>+")


def _longest_match(pattern: PosPattern, tags: Sequence[str | None], start: int) -> int:
    """Length of the longest pattern match at ``start`` (0 = no match)."""
    reachable = {start}
    for tag_re, quant in pattern.elements:
        def advance(pos: int) -> int:
            tag = tags[pos] if pos < len(tags) else None
            return pos + 1 if tag is not None and tag_re.fullmatch(tag) else -1

        nxt = set()
        for pos in reachable:
            if quant in ("?", "*"):
                nxt.add(pos)  # zero occurrences allowed
            hop = advance(pos)
            if quant in ("", "?"):
                if hop >= 0:
                    nxt.add(hop)
            else:  # * or +: chase repeats
                while hop >= 0:
                    nxt.add(hop)
                    hop = advance(hop)
        reachable = nxt
        if not reachable:
            return 0
    return max(reachable) - start


def match_pos_pattern(
    text: str,
    tokens: Sequence[WordToken],
    pattern: PosPattern = DEFAULT_POS_PATTERN,
) -> list[Phrase]:
    """Greedy longest, non-overlapping, left-to-right pattern matches.

    Every non-punctuation token must carry a tag; punctuation tokens never
    match a tag class, so matches cannot straddle them.
    """
    tags: list[str | None] = []
    for tok in tokens:
        if tok.is_punct:
            tags.append(None)
        elif tok.pos_tag is None:
            raise ConfigError(
                f"token {tok.surface!r} has no POS tag; supply tagged input "
                "or tag tokens with tag_tokens() first"
            )
        else:
            tags.append(tok.pos_tag)
    phrases = []
    i = 0
    while i < len(tokens):
        length = _longest_match(pattern, tags, i)
        if length > 0:
            phrases.append(_make_phrase(text, tokens, i, i + length))
            i += length
        else:
            i += 1
    return phrases


def align_phrases(
    phrases: Sequence[Phrase], model_token_spans: Sequence[tuple[int, int]]
) -> list[tuple[int, int]]:
    """Map each phrase to the half-open model-token range it covers.

    A model token belongs to a phrase iff their byte spans intersect; a
    token straddling two phrases is assigned only to the earlier one, so
    ranges stay disjoint.  A phrase intersecting no model token raises.
    """
    ranges: list[tuple[int, int]] = []
    t = 0
    n_tokens = len(model_token_spans)
    for phrase in phrases:
        p_start, p_end = phrase.char_span
        while t < n_tokens and model_token_spans[t][1] <= p_start:
            t += 1
        first = t
        while t < n_tokens and model_token_spans[t][0] < p_end:
            t += 1
        if t == first:
            raise AlignmentError(
                f"phrase {phrase.surface!r} at bytes {phrase.char_span} "
                "intersects no model token"
            )
        ranges.append((first, t))
    return ranges


# -- tagging ---------------------------------------------------------------


def _load_data_lines(name: str) -> list[str]:
    content = resources.files("entropyrank.data").joinpath(name).read_text("utf-8")
    return [line.strip() for line in content.splitlines() if line.strip()]


def load_default_stopwords() -> frozenset[str]:
    return frozenset(_load_data_lines("stopwords.txt"))


def load_stopwords(path) -> frozenset[str]:
    """One lowercase word per line."""
    with open(path, "r", encoding="utf-8") as fh:
        return frozenset(w.strip() for w in fh if w.strip())


def _load_lexicon() -> dict[str, str]:
    lexicon = {}
    for line in _load_data_lines("tag_lexicon.txt"):
        word, _, tag = line.partition("\t")
        if tag:
            lexicon[word] = tag
    return lexicon


_LEXICON: dict[str, str] | None = None


def tag_tokens(tokens: Sequence[WordToken]) -> list[WordToken]:
    """Deterministic lexicon tagger: lookup, else NNP if capitalized, else NN."""
    global _LEXICON
    if _LEXICON is None:
        _LEXICON = _load_lexicon()
    out = []
    for tok in tokens:
        if tok.is_punct or tok.pos_tag is not None:
            out.append(tok)
            continue
        tag = _LEXICON.get(tok.surface.lower())
        if tag is None:
            tag = "NNP" if tok.surface[:1].isupper() else "NN"
        out.append(tok.with_tag(tag))
    return out


def read_tagged(path) -> list[list[WordToken]]:
    """Read tagged documents: ``surface TAB start TAB end TAB tag`` lines,
    blank line between documents."""
    docs: list[list[WordToken]] = []
    current: list[WordToken] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                if current:
                    docs.append(current)
                    current = []
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ParseError(f"expected 4 tab-separated fields, got {len(parts)}", lineno)
            surface, start_s, end_s, tag = parts
            try:
                start, end = int(start_s), int(end_s)
            except ValueError:
                raise ParseError(f"non-integer span in {line!r}", lineno) from None
            current.append(WordToken(surface, start, end, tag or None))
    if current:
        docs.append(current)
    return docs


# -- full-cover tokenization (compression path) -----------------------------


def tokenize_full(text: str) -> list[WordToken]:
    """Tokenize with nothing dropped: words, punctuation, and whitespace
    runs all become tokens, so concatenating surfaces reproduces the text.

    This is the tokenization the n-gram text backends train and code on;
    exact byte coverage is what lets compressed documents round-trip.
    """
    offsets = _byte_offsets(text)
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch.isspace():
            end = pos
            while end < n and text[end].isspace():
                end += 1
        elif _WORD_RE.match(ch) or ch == "'":
            end = pos
            while end < n and (_WORD_RE.match(text[end]) or text[end] == "'"):
                end += 1
        else:
            end = pos + 1
        out.append(WordToken(text[pos:end], offsets[pos], offsets[end]))
        pos = end
    return out
