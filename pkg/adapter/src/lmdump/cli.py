"""Command line: batch analysis to a dump file, or the HTTP service."""

from __future__ import annotations

import argparse
import os
import sys

from .analyze import DEFAULT_CHECKPOINT, AdapterConfig, AnalysisError, Analyzer
from .records import write_dump


def _add_model_args(p):
    p.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT)
    p.add_argument("--device", default="cpu")
    p.add_argument("--max-context", type=int, default=1024)
    p.add_argument("--window-stride", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lmdump",
        description="Per-token entropy/logprob analysis with a causal transformer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="write an analysis dump for text files")
    p.add_argument("texts", nargs="+", help="document text files (doc_id = file stem)")
    p.add_argument("--out", required=True)
    _add_model_args(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the /v1/analyze service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    _add_model_args(p)
    p.set_defaults(func=cmd_serve)
    return parser


def _config(args) -> AdapterConfig:
    return AdapterConfig(
        checkpoint=args.checkpoint,
        device=args.device,
        batch_size=args.batch_size,
        max_context=args.max_context,
        window_stride=args.window_stride,
    )


def cmd_analyze(args) -> int:
    analyzer = Analyzer.from_pretrained(_config(args))
    items = []
    for path in args.texts:
        doc_id = os.path.splitext(os.path.basename(path))[0]
        with open(path, "r", encoding="utf-8") as fh:
            items.append((doc_id, fh.read()))
    records = analyzer.analyze_many(items)
    write_dump(records, args.out, header=analyzer.header())
    print(f"analyzed {len(records)} documents -> {args.out}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    analyzer = Analyzer.from_pretrained(_config(args))
    serve(analyzer, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
