"""
Bag-of-words featurization and padded batches for the seq2seq and NTM views
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import BOS_ID, CLS_ID, CORPUS_DEFAULTS, EOS_ID, PAD_ID
from corpus.loader import DocumentPair
from corpus.tokenizer import tokenize
from corpus.vocab import TopicVocabulary, Vocabulary


@dataclass
class Batch:
    """Three aligned views of the same documents"""
    ids: np.ndarray              # (B, N) encoder input, CLS first
    mask: np.ndarray             # (B, N) True on non-PAD
    decoder_input: np.ndarray    # (B, T) BOS + summary
    targets: np.ndarray          # (B, T) summary + EOS
    target_mask: np.ndarray      # (B, T)
    bow: np.ndarray              # (B, V_topics) counts
    pair_ids: List[str]

    @property
    def size(self) -> int:
        return self.ids.shape[0]

    def target_token_count(self) -> int:
        return int(self.target_mask.sum())


def to_bow(pair: DocumentPair, topic_vocab: TopicVocabulary) -> np.ndarray:
    """Counts of the document's topic-vocabulary words; everything else is dropped"""
    counts = np.zeros(len(topic_vocab), dtype=np.float64)
    for idx in topic_vocab.encode(tokenize(pair.document)):
        counts[idx] += 1
    return counts


def encode_document(text: str, vocab: Vocabulary, max_len: int) -> List[int]:
    """CLS + token ids, hard-truncated so the whole sequence fits max_len"""
    return [CLS_ID] + vocab.encode(tokenize(text))[:max_len - 1]


def encode_summary(text: str, vocab: Vocabulary, max_summary_len: int) -> Tuple[List[int], List[int]]:
    """Teacher-forcing pair (BOS + y, y + EOS), each at most max_summary_len long"""
    body = vocab.encode(tokenize(text))[:max_summary_len - 1]
    return [BOS_ID] + body, body + [EOS_ID]


def pad(rows: Sequence[Sequence[int]]) -> Tuple[np.ndarray, np.ndarray]:
    width = max(len(r) for r in rows)
    ids = np.full((len(rows), width), PAD_ID, dtype=np.int64)
    for i, row in enumerate(rows):
        ids[i, :len(row)] = row
    mask = np.zeros_like(ids, dtype=bool)
    for i, row in enumerate(rows):
        mask[i, :len(row)] = True
    return ids, mask


def collate(pairs: Sequence[DocumentPair], vocab: Vocabulary, topic_vocab: TopicVocabulary,
            max_len: int, max_summary_len: int) -> Batch:
    sources = [encode_document(p.document, vocab, max_len) for p in pairs]
    summaries = [encode_summary(p.summary, vocab, max_summary_len) for p in pairs]
    ids, mask = pad(sources)
    decoder_input, _ = pad([s[0] for s in summaries])
    targets, target_mask = pad([s[1] for s in summaries])
    bow = np.stack([to_bow(p, topic_vocab) for p in pairs]) if pairs else np.zeros((0, len(topic_vocab)))
    return Batch(ids, mask, decoder_input, targets, target_mask, bow, [p.id for p in pairs])


def make_batches(
    pairs: Sequence[DocumentPair],
    vocab: Vocabulary,
    topic_vocab: TopicVocabulary,
    batch_size: int = CORPUS_DEFAULTS["batch_size"],
    max_len: int = CORPUS_DEFAULTS["max_len"],
    shuffle_seed: Optional[int] = None,
    max_summary_len: int = CORPUS_DEFAULTS["max_summary_len"],
) -> List[Batch]:
    """
    Pad each batch to its longest member; the final partial batch is kept

    Args:
        shuffle_seed: None keeps input order, otherwise a reproducible permutation
    """
    order = np.arange(len(pairs))
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(len(pairs))
    batches = []
    for start in range(0, len(pairs), batch_size):
        chunk = [pairs[i] for i in order[start:start + batch_size]]
        batches.append(collate(chunk, vocab, topic_vocab, max_len, max_summary_len))
    return batches
