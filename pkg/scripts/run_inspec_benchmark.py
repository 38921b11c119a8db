#!/usr/bin/env python3
"""Dataset-scale benchmark: extraction quality and the remaining-entropy
curve on a real keyphrase corpus (e.g. Inspec abstracts).

Needs two assets that are not bundled:
  1. the dataset, either as JSONL records {doc_id, text, gold} or as the
     usual benchmark layout (docsutf8/*.txt + keys/*.key);
  2. per-token entropies from a causal transformer, as a dump file
     produced by the companion adapter package:
         lmdump analyze --checkpoint EleutherAI/gpt-neo-1.3B \\
             --out inspec.dump.jsonl docs/*.txt
     (hours of CPU/GPU inference for 2,000 abstracts), or a running
     adapter service via --remote.

With both in place this prints P/R/F1/ROUGE-1 at the requested cutoffs
and the averaged remaining-entropy curve.  The same numbers drive the
optional dataset-scale acceptance checks; export ENTROPYRANK_INSPEC_DIR
and ENTROPYRANK_INSPEC_DUMP and run pytest to execute those.

Usage:
  python scripts/run_inspec_benchmark.py DATASET --dump DUMP [--k 5 10]
  python scripts/run_inspec_benchmark.py DATASET --remote http://host:port
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from entropyrank import (
    DumpBackend,
    ExtractionConfig,
    RemoteBackend,
    extract,
    load_dump,
    remaining_entropy_curve,
    run_benchmark,
)
from entropyrank.evaluate import load_dataset
from entropyrank.extract import score_phrases, segment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("dataset", help="JSONL file or benchmark directory")
    backend_group = parser.add_mutually_exclusive_group(required=True)
    backend_group.add_argument("--dump", help="analysis dump file")
    backend_group.add_argument("--remote", help="adapter endpoint URL")
    parser.add_argument("--k", type=int, nargs="+", default=[5, 10])
    parser.add_argument("--segmenter", choices=("stopwords", "pos"), default="pos")
    parser.add_argument("--curve-k-max", type=int, default=15)
    parser.add_argument("--limit", type=int, help="only score the first N documents")
    args = parser.parse_args()

    dataset = load_dataset(args.dataset)
    if args.limit:
        dataset = dataset[: args.limit]
    backend = DumpBackend(load_dump(args.dump)) if args.dump else RemoteBackend(args.remote)

    results = {}
    curves = []
    config = ExtractionConfig(k=max(args.k), segmenter=args.segmenter)
    curve_config = ExtractionConfig(k=0, segmenter=args.segmenter, dedup=False)
    for i, doc in enumerate(dataset):
        results[doc.doc_id] = extract(doc.text, config, backend, doc_id=doc.doc_id).keyphrases
        phrases = segment(doc.text, curve_config)
        scored = score_phrases(backend, doc.doc_id, doc.text, phrases)
        if len(scored) > args.curve_k_max:
            curve = remaining_entropy_curve(
                [sp.entropy_bits for sp in scored],
                word_count=len(doc.text.split()),
                k_max=args.curve_k_max,
            )
            curves.append([v for _, v in curve])
        if (i + 1) % 100 == 0:
            print(f"  scored {i + 1}/{len(dataset)} documents", file=sys.stderr)

    report = run_benchmark(dataset, results, k_values=args.k)
    print(report.to_table())

    if curves:
        mean_curve = np.mean(np.array(curves), axis=0)
        print(f"\nremaining entropy, mean over {len(curves)} documents (bits/word):")
        for k, value in enumerate(mean_curve):
            print(f"  k={k:2d}  {value:6.3f}")


if __name__ == "__main__":
    main()
