"""
ROUGE-N and ROUGE-L F1
Lowercased word tokens from the corpus tokenizer, no stemming, no stopword
removal. Punctuation-only tokens are dropped after sentence splitting.
"""

from collections import Counter
from dataclasses import asdict, dataclass
from typing import Dict, List, Sequence, Set, Tuple, Union

from corpus.tokenizer import is_word, tokenize
from utils.sentences import SentenceSplitter

TextLike = Union[str, Sequence[str]]


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: int, candidate_count: int, reference_count: int) -> "RougeScore":
        """Zero denominators give zero, f1 = 2pr / (p + r)"""
        precision = overlap / candidate_count if candidate_count else 0.0
        recall = overlap / reference_count if reference_count else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
        return cls(precision=precision, recall=recall, f1=f1)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def rouge_sentences(text: TextLike) -> List[List[str]]:
    """Word tokens grouped by sentence"""
    tokens = tokenize(text) if isinstance(text, str) else list(text)
    sentences = []
    for sentence in SentenceSplitter.split_tokens(tokens):
        words = [t for t in sentence if is_word(t)]
        if words:
            sentences.append(words)
    return sentences


def rouge_tokens(text: TextLike) -> List[str]:
    return [t for sentence in rouge_sentences(text) for t in sentence]


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(candidate: TextLike, reference: TextLike, n: int = 1) -> RougeScore:
    """Clipped n-gram overlap"""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    cand = ngram_counts(rouge_tokens(candidate), n)
    ref = ngram_counts(rouge_tokens(reference), n)
    overlap = sum((cand & ref).values())
    return RougeScore.from_counts(overlap, sum(cand.values()), sum(ref.values()))


def lcs_table(x: Sequence[str], y: Sequence[str]) -> List[List[int]]:
    """table[i][j] = LCS length of x[:i] and y[:j]"""
    table = [[0] * (len(y) + 1) for _ in range(len(x) + 1)]
    for i in range(1, len(x) + 1):
        for j in range(1, len(y) + 1):
            if x[i - 1] == y[j - 1]:
                table[i][j] = table[i - 1][j - 1] + 1
            else:
                table[i][j] = max(table[i - 1][j], table[i][j - 1])
    return table


def lcs_length(x: Sequence[str], y: Sequence[str]) -> int:
    return lcs_table(x, y)[len(x)][len(y)]


def lcs_positions(x: Sequence[str], y: Sequence[str]) -> Set[int]:
    """Positions of x on one LCS with y (the table's traceback, preferring to move up in x)"""
    table = lcs_table(x, y)
    i, j = len(x), len(y)
    hits = set()
    while i > 0 and j > 0:
        if x[i - 1] == y[j - 1]:
            hits.add(i - 1)
            i, j = i - 1, j - 1
        elif table[i - 1][j] >= table[i][j - 1]:
            i -= 1
        else:
            j -= 1
    return hits


def _union_lcs_overlap(candidate: List[List[str]], reference: List[List[str]]) -> int:
    """LCS hits of each reference sentence against the whole candidate, clipped by unigram counts"""
    cand_tokens = [t for s in candidate for t in s]
    cand_left = Counter(cand_tokens)
    ref_left = Counter(t for s in reference for t in s)
    overlap = 0
    for ref_sentence in reference:
        for position in sorted(lcs_positions(ref_sentence, cand_tokens)):
            token = ref_sentence[position]
            if cand_left[token] > 0 and ref_left[token] > 0:
                cand_left[token] -= 1
                ref_left[token] -= 1
                overlap += 1
    return overlap


def rouge_l(candidate: TextLike, reference: TextLike, summary_level: bool = True) -> RougeScore:
    """
    Summary-level union-LCS ROUGE-L, or whole-text LCS when summary_level is False

    Example:
        candidate "a b c d", reference "a c b d" -> LCS 3, p = r = 3/4
    """
    cand_sentences = rouge_sentences(candidate)
    ref_sentences = rouge_sentences(reference)
    cand_count = sum(len(s) for s in cand_sentences)
    ref_count = sum(len(s) for s in ref_sentences)
    if not cand_count or not ref_count:
        return RougeScore.from_counts(0, cand_count, ref_count)
    if summary_level:
        overlap = _union_lcs_overlap(cand_sentences, ref_sentences)
    else:
        overlap = lcs_length([t for s in cand_sentences for t in s], [t for s in ref_sentences for t in s])
    return RougeScore.from_counts(overlap, cand_count, ref_count)


def rouge_all(candidate: TextLike, reference: TextLike, summary_level: bool = True) -> Tuple[RougeScore, ...]:
    """(ROUGE-1, ROUGE-2, ROUGE-L)"""
    return (
        rouge_n(candidate, reference, 1),
        rouge_n(candidate, reference, 2),
        rouge_l(candidate, reference, summary_level=summary_level),
    )
