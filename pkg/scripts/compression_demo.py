#!/usr/bin/env python3
"""Side-information compression experiment.

Samples documents from a trained n-gram model, encodes each with and
without its highest-entropy phrases as side information, and prints the
measured payload savings next to the phrase entropies, plus the
remaining-entropy curve averaged over documents.

Usage: python scripts/compression_demo.py [--seed N] [--docs N] [--k-max N]
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from entropyrank import (
    ScoredPhrase,
    SideInfo,
    Vocabulary,
    encode,
    remaining_entropy_curve,
    select_top_k,
    train,
)
from entropyrank.lm import entropy_bits
from entropyrank.segment import Phrase


def build_model(seed: int):
    vocab = Vocabulary.from_surfaces([f"w{i}" for i in range(24)])
    rng = np.random.default_rng(seed)
    corpus = [rng.integers(2, vocab.size, size=500).tolist() for _ in range(2)]
    return train(corpus, order=2, k_smooth=0.05, vocab=vocab)


def phrase_ranges(n_tokens: int, n_phrases: int, rng):
    cuts = sorted(rng.choice(np.arange(1, n_tokens), size=n_phrases - 1, replace=False))
    bounds = [0, *map(int, cuts), n_tokens]
    return list(zip(bounds, bounds[1:]))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--docs", type=int, default=50)
    parser.add_argument("--k-max", type=int, default=8)
    args = parser.parse_args()

    model = build_model(args.seed)
    rng = np.random.default_rng(args.seed + 1)
    n_phrases = 10

    savings, entropies, curves = [], [], []
    for trial in range(args.docs):
        doc = model.sample(80, seed=10_000 + trial)
        position_h = [entropy_bits(model.next_distribution(doc[:i])) for i in range(len(doc))]
        ranges = phrase_ranges(len(doc), n_phrases, rng)
        scored = [
            ScoredPhrase(
                phrase=Phrase(word_range=r, char_span=(r[0] * 3, r[1] * 3), surface=f"p{i}"),
                entropy_bits=float(sum(position_h[r[0] : r[1]])),
                doc_position=i,
                token_range=r,
            )
            for i, r in enumerate(ranges)
        ]
        top = select_top_k(scored, 2)
        side = SideInfo.from_ranges(doc, [scored[i].token_range for i in top])
        plain = encode(model, doc).bit_length
        with_side = encode(model, doc, side).bit_length
        savings.append(plain - with_side)
        entropies.append(sum(scored[i].entropy_bits for i in top))
        curves.append(
            [v for _, v in remaining_entropy_curve(
                [sp.entropy_bits for sp in scored], word_count=len(doc), k_max=args.k_max
            )]
        )

    print(f"{args.docs} documents, top-2 phrases as side information:")
    print(f"  mean payload saving : {np.mean(savings):8.1f} bits")
    print(f"  mean phrase entropy : {np.mean(entropies):8.1f} bits")
    print(f"  saving / entropy    : {np.mean(savings) / np.mean(entropies):8.3f}")

    mean_curve = np.mean(np.array(curves), axis=0)
    print("\nremaining entropy vs number of side phrases (bits/token):")
    for k, value in enumerate(mean_curve):
        bar = "#" * int(round(value * 8))
        print(f"  k={k:2d}  {value:6.3f}  {bar}")


if __name__ == "__main__":
    main()
