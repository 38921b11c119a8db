"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its measured numbers.  Tolerances are fixed here and
match the documented guarantees; see README for the criterion list.

The two dataset-scale checks at the bottom need the Inspec corpus and a
transformer analysis dump (hours of inference); they run only when the
ENTROPYRANK_INSPEC_* environment variables point at those assets.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from entropyrank import (
    ExtractionConfig,
    NgramTextBackend,
    PhraseWorld,
    ScoredPhrase,
    SideInfo,
    Vocabulary,
    conditional_entropy_bruteforce,
    decode,
    encode,
    entropy_rank_set,
    extract,
    ideal_code_length_bits,
    jaccard,
    joint_entropy,
    optimal_set_bruteforce,
    porter_stem,
    prf_at_k,
    quantize,
    remaining_entropy_curve,
    rouge1,
    select_top_k,
    train,
)
from entropyrank.lm import entropy_bits
from entropyrank.segment import Phrase

from conftest import random_model
from test_eval import PORTER_VECTORS, oracle_jaccard, oracle_prf, oracle_rouge1, random_phrases


def report(name, ok, detail=""):
    print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


def split_into_phrases(doc_len, n_phrases, rng):
    """Random contiguous partition of [0, doc_len) into n_phrases ranges."""
    cuts = sorted(rng.choice(np.arange(1, doc_len), size=n_phrases - 1, replace=False))
    bounds = [0, *map(int, cuts), doc_len]
    return list(zip(bounds, bounds[1:]))


def scored_from_ranges(entropies, ranges):
    out = []
    for pos, (lo, hi) in enumerate(ranges):
        phrase = Phrase(word_range=(lo, hi), char_span=(lo * 4, hi * 4), surface=f"s{pos}")
        out.append(
            ScoredPhrase(
                phrase=phrase,
                entropy_bits=float(sum(entropies[lo:hi])),
                doc_position=pos,
                token_range=(lo, hi),
            )
        )
    return out


class TestTopKOracleEquivalence:
    def test_select_top_k_matches_exhaustive_maximization(self):
        started = time.perf_counter()
        model = random_model(30, order=2, seed=42, corpus_len=600)
        rng = np.random.default_rng(7)
        k = 3
        mismatches = 0
        for trial in range(200):
            doc = model.sample(int(rng.integers(24, 60)), seed=1000 + trial)
            entropies = [
                entropy_bits(model.next_distribution(doc[:i])) for i in range(len(doc))
            ]
            n_phrases = int(rng.integers(4, 13))
            scored = scored_from_ranges(entropies, split_into_phrases(len(doc), n_phrases, rng))
            chosen = set(select_top_k(scored, k))
            scores = [sp.entropy_bits for sp in scored]
            best = max(
                itertools.combinations(range(n_phrases), k),
                key=lambda J: (sum(scores[j] for j in J), tuple(-j for j in J)),
            )
            if chosen != set(best):
                mismatches += 1
        elapsed = time.perf_counter() - started
        report(
            "top-k oracle equivalence",
            mismatches == 0 and elapsed < 5.0,
            f"200 documents, k=3, mismatches={mismatches}, {elapsed:.2f}s (budget 5s)",
        )


class TestCoderRoundTrip:
    def test_thousand_documents_round_trip_within_ideal_plus_two(self):
        started = time.perf_counter()
        configs = [(14, 2, 0.1), (62, 2, 0.1), (254, 1, 0.05), (1022, 2, 0.05)]
        rng = np.random.default_rng(11)
        failures = 0
        worst_excess = -math.inf
        n_docs = 0
        for cfg_idx, (n_reg, order, k_smooth) in enumerate(configs):
            model = random_model(n_reg, order=order, seed=cfg_idx, k_smooth=k_smooth)
            V = model.vocab.size
            for trial in range(250):
                n_docs += 1
                if trial == 0:
                    n = 0
                elif trial == 1:
                    n = 256
                else:
                    n = int(rng.integers(1, 257))
                if trial % 2:
                    doc = model.sample(n, seed=int(rng.integers(1 << 30)))
                else:
                    doc = [int(t) for t in rng.integers(0, V, size=n)]
                side = SideInfo()
                mode = trial % 5
                if n > 0 and mode == 1:
                    side = SideInfo.from_ranges(doc, [(0, min(n, 7))])  # document start
                elif n > 0 and mode == 2:
                    side = SideInfo.from_ranges(doc, [(max(0, n - 7), n)])  # document end
                elif n > 2 and mode == 3:
                    lo = int(rng.integers(0, n - 1))
                    hi = int(rng.integers(lo + 1, n + 1))
                    side = SideInfo.from_ranges(doc, [(lo, hi)])
                elif mode == 4:
                    side = SideInfo.from_ranges(doc, [(0, n)])  # full coverage
                bits = encode(model, doc, side)
                ideal = ideal_code_length_bits(model, doc, side)
                if decode(model, bits, n, side) != doc:
                    failures += 1
                worst_excess = max(worst_excess, bits.bit_length - ideal)
        elapsed = time.perf_counter() - started
        report(
            "coder round-trip",
            failures == 0 and worst_excess <= 2.0 and elapsed < 60.0,
            f"{n_docs} documents, failures={failures}, "
            f"worst payload-ideal={worst_excess:.3f} bits (bound 2), {elapsed:.1f}s (budget 60s)",
        )


class TestSideInformationSaving:
    def test_mean_saving_approaches_phrase_entropy(self):
        model = random_model(22, order=2, seed=5, k_smooth=0.05, corpus_len=500)
        lo, hi = 20, 40
        span = hi - lo
        per_token_margins = []
        instance_failures = 0
        for trial in range(500):
            doc = model.sample(56, seed=20_000 + trial)
            side = SideInfo.from_ranges(doc, [(lo, hi)])
            saving = encode(model, doc).bit_length - encode(model, doc, side).bit_length
            phrase_self_info = sum(
                quantize(model.next_distribution(doc[:i])).self_information_bits(doc[i])
                for i in range(lo, hi)
            )
            h_m = sum(
                entropy_bits(model.next_distribution(doc[:i])) for i in range(lo, hi)
            )
            if saving < phrase_self_info - 4:
                instance_failures += 1
            per_token_margins.append((saving - h_m) / span)
        mean_margin = float(np.mean(per_token_margins))
        report(
            "side-information saving",
            instance_failures == 0 and mean_margin >= -0.2,
            f"500 sampled documents, per-instance failures={instance_failures}, "
            f"mean per-token saving - H_m = {mean_margin:+.4f} bits (bound -0.2)",
        )


class TestChainRuleAndOptimality:
    def make_worlds(self):
        shapes = [(2, 5), (3, 4), (4, 4), (5, 3), (6, 5), (3, 5), (4, 3), (6, 4), (2, 4), (5, 4)]
        worlds = []
        for seed, (n_values, n_positions) in enumerate(shapes):
            model = random_model(n_values, order=2, seed=50 + seed, corpus_len=80)
            worlds.append(
                PhraseWorld(
                    model=model,
                    dictionary=tuple(range(2, 2 + n_values)),
                    n_positions=n_positions,
                )
            )
        return worlds

    def test_entropy_decomposition_is_exact(self):
        rng = np.random.default_rng(23)
        worst = 0.0
        checks = 0
        for world in self.make_worlds():
            h_all = joint_entropy(world)
            joint = world.joint()
            for _ in range(10):
                size = int(rng.integers(0, world.n_positions + 1))
                J = tuple(
                    sorted(rng.choice(world.n_positions, size=size, replace=False).tolist())
                )
                marg: dict[tuple, float] = {}
                for outcome, p in joint.items():
                    key = tuple(outcome[j] for j in J)
                    marg[key] = marg.get(key, 0.0) + p
                h_j = -sum(p * math.log2(p) for p in marg.values() if p > 0)
                gap = abs(h_j + conditional_entropy_bruteforce(world, J) - h_all)
                worst = max(worst, gap)
                checks += 1
        report(
            "entropy chain rule",
            checks == 100 and worst <= 1e-9,
            f"{checks} random index sets, worst |H(X_J)+H(rest|X_J)-H(X)| = {worst:.2e} (tol 1e-9)",
        )

    def test_exhaustive_optimum_never_loses_to_entropy_ranking(self):
        violations = 0
        gaps = []
        for world in self.make_worlds():
            for k in range(world.n_positions + 1):
                h_opt = conditional_entropy_bruteforce(world, optimal_set_bruteforce(world, k))
                h_rank = conditional_entropy_bruteforce(world, entropy_rank_set(world, k))
                if h_opt > h_rank + 1e-9:
                    violations += 1
                gaps.append(h_rank - h_opt)
        report(
            "exhaustive optimum vs entropy ranking",
            violations == 0,
            f"violations={violations}; ranked-selection excess entropy: "
            f"mean={np.mean(gaps):.4f} bits, max={np.max(gaps):.4f} bits (gap reported, not bounded)",
        )


class TestCurveMonotonicity:
    def test_curve_never_increases_and_ends_at_zero(self):
        model = random_model(16, order=2, seed=77)
        rng = np.random.default_rng(78)
        bad_monotone = bad_endpoint = 0
        for trial in range(100):
            doc = model.sample(int(rng.integers(12, 80)), seed=3000 + trial)
            entropies = [
                entropy_bits(model.next_distribution(doc[:i])) for i in range(len(doc))
            ]
            n_phrases = int(rng.integers(2, min(12, len(doc))))
            # phrases partition every scored position, so nothing remains at k=n
            scored = scored_from_ranges(entropies, split_into_phrases(len(doc), n_phrases, rng))
            curve = remaining_entropy_curve(
                [sp.entropy_bits for sp in scored], word_count=len(doc), k_max=n_phrases
            )
            values = [v for _, v in curve]
            if any(a < b - 1e-12 for a, b in zip(values, values[1:])):
                bad_monotone += 1
            if abs(values[-1]) > 1e-9:
                bad_endpoint += 1
        report(
            "remaining-entropy curve shape",
            bad_monotone == 0 and bad_endpoint == 0,
            f"100 documents: non-monotone={bad_monotone}, nonzero k=n endpoint={bad_endpoint}",
        )


class TestMetricsOracle:
    def test_metrics_match_bruteforce_recounts(self):
        rng = np.random.default_rng(90)
        mismatches = 0
        for _ in range(50):
            pred = random_phrases(rng)
            gold = random_phrases(rng) or ["alpha"]
            k = int(rng.integers(1, 8))
            if prf_at_k(pred, gold, k) != pytest.approx(oracle_prf(pred, gold, k)):
                mismatches += 1
            if rouge1(pred, gold) != pytest.approx(oracle_rouge1(pred, gold)):
                mismatches += 1
            if jaccard(pred, gold) != pytest.approx(oracle_jaccard(pred, gold)):
                mismatches += 1
        report(
            "metrics vs brute-force recounts",
            mismatches == 0,
            f"50 random instances x 3 metrics, mismatches={mismatches}",
        )

    def test_porter_vectors_all_pass(self):
        wrong = [(w, porter_stem(w), e) for w, e in PORTER_VECTORS if porter_stem(w) != e]
        report(
            "Porter stemmer published vectors",
            not wrong,
            f"{len(PORTER_VECTORS)} vectors, failures={len(wrong)} {wrong[:3]}",
        )


FILLER = [f"fill{i}" for i in range(12)]
RARE = [f"rare{i:03d}" for i in range(400)]


def planted_phrase_trial(seed: int) -> bool:
    rng = np.random.default_rng(seed)
    pattern = []
    for i in range(0, len(FILLER), 2):
        pattern.append(f"the {FILLER[i]} {FILLER[i + 1]}")
    corpus_text = " ".join(pattern * 30)
    planted = " ".join(rng.choice(RARE, size=3, replace=False))
    sentences = pattern * 3
    insert_at = int(rng.integers(1, len(sentences)))
    doc_text = " ".join(
        sentences[:insert_at] + [f"the {planted}"] + sentences[insert_at:]
    )

    from entropyrank.segment import tokenize_full

    surfaces = sorted(
        {t.surface for t in tokenize_full(corpus_text)} | set(RARE)
    )
    vocab = Vocabulary.from_surfaces(surfaces)
    corpus_ids = [[vocab.id_of(t.surface) for t in tokenize_full(corpus_text)]]
    model = train(corpus_ids, order=3, k_smooth=0.01, vocab=vocab)
    result = extract(
        doc_text,
        ExtractionConfig(k=1, segmenter="stopwords", stopwords=frozenset({"the"})),
        NgramTextBackend(model),
    )
    return bool(result.keyphrases) and result.keyphrases[0] == planted


class TestPlantedKeyphraseRecovery:
    def test_planted_high_entropy_phrase_ranks_first(self):
        hits = sum(planted_phrase_trial(seed) for seed in range(100))
        report(
            "planted-keyphrase recovery",
            hits >= 95,
            f"{hits}/100 seeded trials ranked the planted phrase first (need >= 95)",
        )


# -- dataset-scale checks (optional heavy assets) ----------------------------

INSPEC_DIR = os.environ.get("ENTROPYRANK_INSPEC_DIR")
INSPEC_DUMP = os.environ.get("ENTROPYRANK_INSPEC_DUMP")
needs_assets = pytest.mark.skipif(
    not (INSPEC_DIR and INSPEC_DUMP),
    reason=(
        "needs the Inspec benchmark and a transformer analysis dump: set "
        "ENTROPYRANK_INSPEC_DIR and ENTROPYRANK_INSPEC_DUMP (see "
        "scripts/run_inspec_benchmark.py; producing the dump takes hours of inference)"
    ),
)


@needs_assets
class TestInspecBenchmark:
    @pytest.fixture(scope="class")
    def inspec_report(self):
        from entropyrank import DumpBackend, load_dump, run_benchmark
        from entropyrank.evaluate import load_dataset

        dataset = load_dataset(INSPEC_DIR)
        backend = DumpBackend(load_dump(INSPEC_DUMP))
        results = {}
        for doc in dataset:
            config = ExtractionConfig(k=10, segmenter="pos")
            results[doc.doc_id] = extract(
                doc.text, config, backend, doc_id=doc.doc_id
            ).keyphrases
        return run_benchmark(dataset, results, k_values=[5, 10])

    def test_f1_and_rouge_near_reference_scores(self, inspec_report):
        m5, m10 = inspec_report.per_k[5], inspec_report.per_k[10]
        ok = (
            abs(m5.f1 - 28.26) <= 3.0
            and abs(m5.rouge1 - 43.8) <= 3.0
            and abs(m10.f1 - 32.39) <= 3.0
        )
        report(
            "Inspec benchmark scores",
            ok,
            f"@5 F1={m5.f1:.2f} (target 28.26±3), RO1={m5.rouge1:.2f} (43.8±3), "
            f"@10 F1={m10.f1:.2f} (32.39±3)",
        )

    def test_remaining_entropy_curve_band(self):
        from entropyrank import DumpBackend, load_dump
        from entropyrank.evaluate import load_dataset
        from entropyrank.extract import score_phrases, segment

        dataset = load_dataset(INSPEC_DIR)
        backend = DumpBackend(load_dump(INSPEC_DUMP))
        curves = []
        config = ExtractionConfig(k=0, segmenter="pos", dedup=False)
        for doc in dataset:
            phrases = segment(doc.text, config)
            scored = score_phrases(backend, doc.doc_id, doc.text, phrases)
            if len(scored) < 16:
                continue
            curve = remaining_entropy_curve(
                [sp.entropy_bits for sp in scored],
                word_count=len(doc.text.split()),
                k_max=15,
            )
            curves.append([v for _, v in curve])
        mean_curve = np.mean(np.array(curves), axis=0)
        non_increasing = all(a >= b - 1e-9 for a, b in zip(mean_curve, mean_curve[1:]))
        in_band = all(3.0 <= v <= 5.5 for v in mean_curve)
        report(
            "Inspec remaining-entropy curve",
            non_increasing and in_band,
            f"k=0..15 mean curve {mean_curve[0]:.2f}->{mean_curve[-1]:.2f} bits/word, "
            f"monotone={non_increasing}, within [3, 5.5]={in_band}",
        )
