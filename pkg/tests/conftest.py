"""
Shared fixtures: seeded generators, fixture corpora, tiny model configs
"""

from pathlib import Path

import numpy as np
import pytest

from corpus.batching import make_batches
from corpus.loader import DocumentPair, read_pairs
from corpus.vocab import TopicVocabulary, build_vocab
from models.config import ModelConfig

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def tiny_pairs():
    return read_pairs(FIXTURES / "tiny_corpus.jsonl")


@pytest.fixture
def tiny_vocabs(tiny_pairs):
    vocab = build_vocab(tiny_pairs, cap=500)
    topic_vocab = TopicVocabulary.build(tiny_pairs, cap=200)
    return vocab, topic_vocab


def micro_config(vocab_size: int = 12, topic_vocab_size: int = 6, **overrides) -> ModelConfig:
    """Smallest useful model: H=8, 2 heads, 1+1 layers, K=2, no dropout"""
    settings = dict(
        vocab_size=vocab_size,
        topic_vocab_size=topic_vocab_size,
        hidden=8,
        heads=2,
        encoder_layers=1,
        decoder_layers=1,
        ffn_width=16,
        max_len=16,
        max_summary_len=8,
        dropout=0.0,
        topics=2,
        ntm_hidden=8,
        ntm_pretrain_epochs=0,
        seed=3,
    )
    settings.update(overrides)
    return ModelConfig(**settings)


@pytest.fixture
def make_micro_config():
    return micro_config


@pytest.fixture
def micro_batch():
    """Two tiny documents as a padded batch over a 12-token vocabulary"""
    from corpus.vocab import Vocabulary

    pairs = [
        DocumentPair(document="red fox jumps high", summary="fox jumps", id="d1"),
        DocumentPair(document="blue bird sings", summary="bird sings", id="d2"),
    ]
    vocab = Vocabulary(["red", "fox", "jumps", "high", "blue", "bird", "sings"])
    topic_vocab = TopicVocabulary(["red", "fox", "jumps", "high", "blue", "bird"])
    return make_batches(pairs, vocab, topic_vocab, batch_size=2, max_len=16, max_summary_len=8)[0]


def synthetic_topic_corpus(rng: np.random.Generator, documents: int = 300, words_per_doc: int = 20):
    """
    Three disjoint 3-word clusters over a 9-word vocabulary; each document draws
    its words from one cluster. Returns (bow matrix, cluster labels).
    """
    clusters = np.arange(9).reshape(3, 3)
    labels = rng.integers(0, 3, size=documents)
    bow = np.zeros((documents, 9))
    for d, label in enumerate(labels):
        for word in rng.choice(clusters[label], size=words_per_doc):
            bow[d, word] += 1
    return bow, labels


def micro_run_settings(output_dir: Path, **overrides) -> dict:
    """Flat run configuration for a seconds-long training run on the tiny corpus"""
    settings = dict(
        train_path=str(FIXTURES / "tiny_corpus.jsonl"),
        output_dir=str(output_dir),
        epochs=2,
        seed=7,
        batch_size=4,
        max_len=48,
        max_summary_len=12,
        validation_fraction=0.0,
        hidden=8,
        heads=2,
        encoder_layers=1,
        decoder_layers=1,
        ffn_width=16,
        dropout=0.0,
        topics=2,
        ntm_hidden=8,
        ntm_pretrain_epochs=1,
        learning_rate=0.01,
        beam_size=2,
        min_len=0,
    )
    settings.update(overrides)
    return settings
