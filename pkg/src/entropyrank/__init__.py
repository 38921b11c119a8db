"""EntropyRank: rank phrases by conditional entropy under a causal LM,
select keyphrases by count or bit budget, and demonstrate the scores'
operational meaning with an arithmetic coder that accepts keyphrases as
side information."""

from .lm import (
    CausalLM,
    TokenDistribution,
    Vocabulary,
    entropy_bits,
    phrase_entropy_bits,
    self_information_bits,
)
from .ngram import NGramModel, train
from .world import (
    PhraseWorld,
    conditional_entropy_bruteforce,
    entropy_rank_set,
    joint_entropy,
    optimal_set_bruteforce,
)
from .dump import DumpRecord, PrecomputedLM, fetch_remote, load_dump, save_dump
from .segment import (
    Phrase,
    PosPattern,
    WordToken,
    align_phrases,
    chunk_by_stopwords,
    match_pos_pattern,
    tokenize_words,
)
from .extract import (
    DumpBackend,
    ExtractionConfig,
    NgramTextBackend,
    RemoteBackend,
    ScoredPhrase,
    dedup_normalized,
    extract,
    score_phrases,
    select_by_threshold,
    select_top_k,
)
from .coder import (
    Bitstream,
    QuantizedCDF,
    SideInfo,
    decode,
    encode,
    ideal_code_length_bits,
    quantize,
    remaining_entropy_curve,
)
from .evaluate import (
    LabeledDocument,
    MetricsReport,
    jaccard,
    prf_at_k,
    rouge1,
    run_benchmark,
)
from .stem import normalize_phrase, porter_stem

__version__ = "0.1.0"
