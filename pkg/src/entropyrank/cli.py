"""Command-line surface for batch use.

Subcommands: train-ngram, extract, compress, decompress, curve, evaluate,
compare.  Exit codes: 0 success, 2 usage/config error, 3 input data error,
4 container/format error.  A JSON defaults file can be pointed to with the
ENTROPYRANK_CONFIG environment variable; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import coder as coder_mod
from . import ngram as ngram_mod
from .dump import format_float, load_dump
from .errors import (
    AlignmentError,
    ConfigError,
    DataError,
    DecodeError,
    EntropyRankError,
    FormatError,
    GuardError,
    ParseError,
    RemoteError,
    ValidationError,
)
from .evaluate import jaccard, load_dataset, run_benchmark
from .extract import (
    DumpBackend,
    ExtractionConfig,
    NgramTextBackend,
    RemoteBackend,
    extract,
    segment,
    score_phrases,
)
from .segment import load_stopwords

DEFAULT_SEED = 20230821

_EXIT_CONFIG = 2
_EXIT_DATA = 3
_EXIT_FORMAT = 4

_DATA_ERRORS = (
    ValidationError,
    ParseError,
    DataError,
    AlignmentError,
    GuardError,
    RemoteError,
    FileNotFoundError,
    IsADirectoryError,
    PermissionError,
)
_FORMAT_ERRORS = (FormatError, DecodeError)


def _resolve_backend(selector: str):
    """Parse --backend ngram:<path> | dump:<path> | remote:<url>."""
    kind, sep, arg = selector.partition(":")
    if not sep or not arg:
        raise ConfigError(
            f"backend must be ngram:<path>, dump:<path>, or remote:<url>, got {selector!r}"
        )
    if kind == "ngram":
        return NgramTextBackend(ngram_mod.NGramModel.load(arg))
    if kind == "dump":
        return DumpBackend(load_dump(arg))
    if kind == "remote":
        return RemoteBackend(arg)
    raise ConfigError(f"unknown backend kind {kind!r}")


def _extraction_config(args) -> ExtractionConfig:
    stopwords = None
    if getattr(args, "stopwords", None):
        stopwords = load_stopwords(args.stopwords)
    k = args.k
    tau = getattr(args, "tau", None)
    if k is None and tau is None:
        k = 10
    return ExtractionConfig(
        k=k,
        tau_bits=tau,
        segmenter=args.segmenter,
        dedup=not args.no_dedup,
        stopwords=stopwords,
    )


def _read_text(path) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _doc_id_for(path) -> str:
    base = os.path.basename(path)
    return base[: -len(".txt")] if base.endswith(".txt") else base


# -- subcommands -------------------------------------------------------------


def cmd_train_ngram(args) -> int:
    from .segment import tokenize_full
    from .lm import Vocabulary

    texts = [_read_text(p) for p in args.corpus]
    token_docs = [[t.surface for t in tokenize_full(text)] for text in texts]
    surfaces = sorted({s for doc in token_docs for s in doc})
    vocab = Vocabulary.from_surfaces(surfaces)
    corpus_ids = [[vocab.id_of(s) for s in doc] for doc in token_docs]
    model = ngram_mod.train(corpus_ids, order=args.order, k_smooth=args.k_smooth, vocab=vocab)
    model.save(args.out)
    print(f"trained order-{args.order} model on {len(texts)} documents -> {args.out}")
    return 0


def _extract_one(backend, config, path):
    text = _read_text(path)
    doc_id = _doc_id_for(path)
    result = extract(text, config, backend, doc_id=doc_id)
    return doc_id, result


def cmd_extract(args) -> int:
    backend = _resolve_backend(args.backend)
    config = _extraction_config(args)
    jobs = max(1, args.jobs)
    lines = []
    if jobs == 1:
        outcomes = [_extract_one(backend, config, p) for p in args.texts]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda p: _extract_one(backend, config, p), args.texts))
    for doc_id, result in outcomes:
        payload = {
            "doc_id": doc_id,
            "keyphrases": [
                {
                    "surface": sp.phrase.surface,
                    "entropy_bits": float(format_float(sp.entropy_bits)),
                    "char_span": list(sp.phrase.char_span),
                    "position": sp.doc_position,
                }
                for sp in result.ranked
            ],
        }
        if not result.threshold_met:
            payload["threshold_met"] = False
        lines.append(json.dumps(payload, ensure_ascii=False))
    output = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output)
    return 0


def cmd_compress(args) -> int:
    model = ngram_mod.NGramModel.load(args.model)
    backend = NgramTextBackend(model)
    text = _read_text(args.text)
    ids, _spans = backend.token_ids(text)
    side = coder_mod.SideInfo()
    if args.k and args.k > 0:
        config = ExtractionConfig(k=args.k, segmenter=args.segmenter, dedup=False)
        result = extract(text, config, backend, doc_id=_doc_id_for(args.text))
        ranges = [sp.token_range for sp in result.ranked if sp.token_range]
        side = coder_mod.SideInfo.from_ranges(ids, ranges)
    bits = coder_mod.encode(model, ids, side)
    ideal = coder_mod.ideal_code_length_bits(model, ids, side)
    blob = coder_mod.pack_container(model.fingerprint(), len(ids), side, bits)
    with open(args.out, "wb") as fh:
        fh.write(blob)
    print(
        f"payload_bits={bits.bit_length} ideal_bits={format_float(ideal)} "
        f"side_tokens={side.n_tokens} container_bytes={len(blob)}"
    )
    return 0


def cmd_decompress(args) -> int:
    model = ngram_mod.NGramModel.load(args.model)
    with open(args.container, "rb") as fh:
        blob = fh.read()
    model_hash, n_tokens, side, bits = coder_mod.unpack_container(blob)
    coder_mod.verify_model_hash(model_hash, model.fingerprint())
    ids = coder_mod.decode(model, bits, n_tokens, side)
    text = "".join(model.vocab.surface_of(t) for t in ids)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_curve(args) -> int:
    backend = _resolve_backend(args.backend)
    text = _read_text(args.text)
    doc_id = _doc_id_for(args.text)
    config = ExtractionConfig(k=0, segmenter=args.segmenter, dedup=False)
    phrases = segment(text, config)
    scored = score_phrases(backend, doc_id, text, phrases)
    k_max = args.k_max if args.k_max is not None else len(scored)
    k_max = min(k_max, len(scored))
    curve = coder_mod.remaining_entropy_curve(
        [sp.entropy_bits for sp in scored], word_count=len(text.split()), k_max=k_max
    )
    lines = [f"{k}\t{format_float(bpw)}" for k, bpw in curve]
    output = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(output)
    else:
        sys.stdout.write(output)
    return 0


def _load_results(path) -> dict[str, list[str]]:
    results = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                results[obj["doc_id"]] = [kp["surface"] for kp in obj["keyphrases"]]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(f"bad results record: {exc}", lineno) from None
    return results


def cmd_evaluate(args) -> int:
    dataset = load_dataset(args.dataset)
    results = _load_results(args.results)
    report = run_benchmark(dataset, results, args.k_values)
    if args.json:
        print(report.to_json())
    else:
        print(report.to_table())
    return 0


def cmd_compare(args) -> int:
    a = _load_results(args.results_a)
    b = _load_results(args.results_b)
    shared = sorted(set(a) & set(b))
    if not shared:
        raise DataError("the two result files share no doc_ids")
    scores = []
    for doc_id in shared:
        score = jaccard(a[doc_id], b[doc_id])
        scores.append(score)
        print(f"{doc_id}\t{format_float(score)}")
    print(f"mean\t{format_float(sum(scores) / len(scores))}")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entropyrank",
        description="Entropy-ranked keyphrase extraction and LM compression toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, backend=True):
        if backend:
            p.add_argument("--backend", required=True, help="ngram:<path> | dump:<path> | remote:<url>")
        p.add_argument("--segmenter", choices=("stopwords", "pos"), default="stopwords")
        p.add_argument("--stopwords", help="stopword file, one lowercase word per line")
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("train-ngram", help="train an add-k n-gram model on text files")
    p.add_argument("corpus", nargs="+", help="training text files")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--k-smooth", type=float, default=0.05)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ngram)

    p = sub.add_parser("extract", help="extract ranked keyphrases from documents")
    p.add_argument("texts", nargs="+", help="document text files")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--k", type=int, default=None)
    group.add_argument("--tau", type=float, default=None, help="bit threshold instead of k")
    p.add_argument("--no-dedup", action="store_true")
    p.add_argument("--out", help="results file (default stdout)")
    add_common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("compress", help="arithmetic-code a document with keyphrase side info")
    p.add_argument("text")
    p.add_argument("--model", required=True, help="ngram model path (full distributions required)")
    p.add_argument("--k", type=int, default=0, help="use top-k phrases as side information")
    p.add_argument("--segmenter", choices=("stopwords", "pos"), default="stopwords")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="reconstruct a document from a container")
    p.add_argument("container")
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="output text file (default stdout)")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("curve", help="remaining-entropy curve for one document")
    p.add_argument("text")
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--out")
    add_common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("evaluate", help="score extraction results against gold labels")
    p.add_argument("dataset", help="dataset JSONL or benchmark directory")
    p.add_argument("results", help="extraction results file")
    p.add_argument("--k-values", type=int, nargs="+", default=[5, 10])
    p.add_argument("--json", action="store_true", help="machine-readable report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="Jaccard similarity between two result files")
    p.add_argument("results_a")
    p.add_argument("results_b")
    p.set_defaults(func=cmd_compare)

    parser._subcommand_parsers = list(sub.choices.values())
    return parser


def _apply_env_config(parser: argparse.ArgumentParser) -> None:
    path = os.environ.get("ENTROPYRANK_CONFIG")
    if not path:
        return
    try:
        with open(path, "r", encoding="utf-8") as fh:
            defaults = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read ENTROPYRANK_CONFIG file {path!r}: {exc}") from None
    if not isinstance(defaults, dict):
        raise ConfigError("ENTROPYRANK_CONFIG must contain a JSON object of defaults")
    mapped = {k.replace("-", "_"): v for k, v in defaults.items()}
    # parser-level defaults override argument-level ones, but each
    # subcommand parser keeps its own table, so apply everywhere
    for target in (parser, *getattr(parser, "_subcommand_parsers", ())):
        target.set_defaults(**mapped)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        _apply_env_config(parser)
        args = parser.parse_args(argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except _FORMAT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_FORMAT
    except _DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA
    except EntropyRankError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
