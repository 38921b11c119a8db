import pytest
import torch
from tokenizers import Tokenizer, models, pre_tokenizers
from transformers import GPT2Config, GPT2LMHeadModel, PreTrainedTokenizerFast

from lmdump import AdapterConfig, Analyzer

WORDS = [
    "the", "a", "cat", "dog", "sat", "ran", "on", "mat", "rug", "big",
    "small", "fast", "slow", "tree", "house", "bird", "fish", "jumped",
    "walked", "quietly", "hello", "world", "héllo", "wörld", "über",
    ".", ",", "!", "?", ";",
]


def build_tokenizer() -> PreTrainedTokenizerFast:
    vocab = {"[UNK]": 0, "<|bos|>": 1}
    for word in WORDS:
        vocab[word] = len(vocab)
    tok = Tokenizer(models.WordLevel(vocab, unk_token="[UNK]"))
    tok.pre_tokenizer = pre_tokenizers.Whitespace()
    return PreTrainedTokenizerFast(
        tokenizer_object=tok, bos_token="<|bos|>", unk_token="[UNK]"
    )


def build_model(vocab_size: int, n_positions: int = 48) -> GPT2LMHeadModel:
    torch.manual_seed(1234)
    config = GPT2Config(
        vocab_size=vocab_size,
        n_positions=n_positions,
        n_embd=32,
        n_layer=2,
        n_head=2,
        bos_token_id=1,
        eos_token_id=1,
    )
    return GPT2LMHeadModel(config).eval()


@pytest.fixture(scope="session")
def tiny_tokenizer():
    return build_tokenizer()


@pytest.fixture(scope="session")
def tiny_model(tiny_tokenizer):
    return build_model(tiny_tokenizer.vocab_size)


@pytest.fixture
def analyzer(tiny_model, tiny_tokenizer):
    config = AdapterConfig(checkpoint="tiny-fixture", max_context=48)
    return Analyzer(tiny_model, tiny_tokenizer, config)


def make_analyzer(tiny_model, tiny_tokenizer, **overrides) -> Analyzer:
    config = AdapterConfig(checkpoint="tiny-fixture", max_context=48)
    for key, value in overrides.items():
        config = AdapterConfig(**{**config.__dict__, key: value})
    return Analyzer(tiny_model, tiny_tokenizer, config)
