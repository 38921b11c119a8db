import numpy as np
import pytest

from entropyrank import NGramModel, Vocabulary, train


def make_vocab(n_regular: int) -> Vocabulary:
    """Vocabulary of n_regular word surfaces plus BOS/EOS (ids 0 and 1)."""
    return Vocabulary.from_surfaces([f"w{i}" for i in range(n_regular)])


def random_model(
    n_regular: int, order: int, seed: int, k_smooth: float = 0.1, corpus_len: int = 400
) -> NGramModel:
    """Model trained on a seeded random corpus; distributions are varied
    but strictly positive everywhere."""
    vocab = make_vocab(n_regular)
    rng = np.random.default_rng(seed)
    corpus = [rng.integers(2, vocab.size, size=corpus_len).tolist() for _ in range(2)]
    return train(corpus, order=order, k_smooth=k_smooth, vocab=vocab)


@pytest.fixture
def uniform4_model() -> NGramModel:
    """Untrained order-1 model over 4 ids: every distribution is uniform."""
    return NGramModel(order=1, k_smooth=1.0, vocab=make_vocab(2))
