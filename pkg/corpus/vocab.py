"""
Seq2seq vocabulary (with special tokens) and the stopword-filtered topic vocabulary
"""

import logging
from collections import Counter
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Union

from config import SPECIAL_TOKENS, STOPWORDS_PATH, UNK_ID
from corpus.loader import DocumentPair
from corpus.tokenizer import is_word, tokenize
from utils.errors import ConfigValidationError, EmptyCorpusError

logger = logging.getLogger(__name__)


def load_stopwords(path: Union[str, Path] = STOPWORDS_PATH) -> FrozenSet[str]:
    """Plain text, one word per line; '#' starts a comment"""
    words = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.add(word)
    return frozenset(words)


def rank_tokens(counts: Counter, limit: int, min_count: int) -> List[str]:
    """Frequency descending, then lexicographic; deterministic for a given corpus"""
    eligible = [(token, n) for token, n in counts.items() if n >= min_count]
    eligible.sort(key=lambda item: (-item[1], item[0]))
    return [token for token, _ in eligible[:max(limit, 0)]]


class Vocabulary:
    """Bijective token <-> id map; special tokens occupy the first ids"""

    def __init__(self, tokens: Sequence[str], specials: Sequence[str] = SPECIAL_TOKENS):
        self.specials = tuple(specials)
        self.id_to_token: List[str] = list(self.specials) + [t for t in tokens if t not in self.specials]
        self.token_to_id: Dict[str, int] = {t: i for i, t in enumerate(self.id_to_token)}

    def __len__(self) -> int:
        return len(self.id_to_token)

    def __contains__(self, token: str) -> bool:
        return token in self.token_to_id

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.id_to_token == other.id_to_token

    @property
    def size(self) -> int:
        return len(self)

    def encode(self, tokens: Iterable[str]) -> List[int]:
        return [self.token_to_id.get(t, UNK_ID) for t in tokens]

    def decode(self, ids: Iterable[int], skip_specials: bool = True) -> List[str]:
        special_ids = set(range(len(self.specials)))
        return [self.id_to_token[i] for i in ids if not (skip_specials and i in special_ids)]

    # ---- persistence ----
    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(self.id_to_token) + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Vocabulary":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        header, tokens = lines[:len(SPECIAL_TOKENS)], lines[len(SPECIAL_TOKENS):]
        if tuple(header) != SPECIAL_TOKENS:
            raise ConfigValidationError("vocab", f"{path} does not start with the special-token header")
        return cls(tokens)

    @classmethod
    def build(cls, pairs: Sequence[DocumentPair], cap: int, min_count: int = 1) -> "Vocabulary":
        return build_vocab(pairs, cap, min_count)


class TopicVocabulary(Vocabulary):
    """Vocabulary of the NTM bag-of-words view: no specials, stopwords and punctuation removed"""

    def __init__(self, tokens: Sequence[str]):
        super().__init__(tokens, specials=())

    def encode(self, tokens: Iterable[str]) -> List[int]:
        return [self.token_to_id[t] for t in tokens if t in self.token_to_id]

    @classmethod
    def load(cls, path: Union[str, Path]) -> "TopicVocabulary":
        return cls(Path(path).read_text(encoding="utf-8").splitlines())

    @classmethod
    def build(cls, pairs: Sequence[DocumentPair], cap: int, min_count: int = 1,
              stopwords: Optional[FrozenSet[str]] = None) -> "TopicVocabulary":
        """Count document tokens only; the NTM never sees summaries"""
        if not pairs:
            raise EmptyCorpusError("cannot build a topic vocabulary from an empty corpus")
        stopwords = load_stopwords() if stopwords is None else stopwords
        counts = Counter(
            t for pair in pairs for t in tokenize(pair.document)
            if is_word(t) and t not in stopwords
        )
        vocab = cls(rank_tokens(counts, cap, min_count))
        logger.info("topic vocabulary: %d words (cap %d)", len(vocab), cap)
        return vocab


def build_vocab(pairs: Sequence[DocumentPair], cap: int, min_count: int = 1) -> Vocabulary:
    """
    Build the seq2seq vocabulary over documents and summaries

    Args:
        cap: total size including the special tokens
        min_count: tokens seen fewer times are left to UNK

    Raises:
        EmptyCorpusError: no pairs
        ConfigValidationError: cap cannot hold the special tokens
    """
    if not pairs:
        raise EmptyCorpusError("cannot build a vocabulary from an empty corpus")
    if cap < len(SPECIAL_TOKENS):
        raise ConfigValidationError("vocab_cap", f"must be >= {len(SPECIAL_TOKENS)} to hold the special tokens")
    counts = Counter()
    for pair in pairs:
        counts.update(tokenize(pair.document))
        counts.update(tokenize(pair.summary))
    for special in SPECIAL_TOKENS:
        counts.pop(special, None)
    vocab = Vocabulary(rank_tokens(counts, cap - len(SPECIAL_TOKENS), min_count))
    logger.info("vocabulary: %d tokens (cap %d, min_count %d)", len(vocab), cap, min_count)
    return vocab
