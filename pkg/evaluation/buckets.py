"""
Length buckets by document sentence count
"""

from typing import Dict, List, Sequence, Tuple, TypeVar

from config import BUCKET_NAMES, LENGTH_BUCKETS
from utils.errors import ConfigValidationError
from utils.sentences import SentenceSplitter

T = TypeVar("T")


def bucket_name(sentence_count: int, boundaries: Tuple[int, int] = LENGTH_BUCKETS) -> str:
    """short: < low, medium: low..high inclusive, long: > high"""
    low, high = boundaries
    if sentence_count < low:
        return BUCKET_NAMES[0]
    if sentence_count <= high:
        return BUCKET_NAMES[1]
    return BUCKET_NAMES[2]


def parse_boundaries(text: str) -> Tuple[int, int]:
    """'19,30' -> (19, 30)"""
    try:
        low, high = (int(part) for part in text.split(","))
    except ValueError:
        raise ConfigValidationError("buckets", f"expected two comma-separated integers, got '{text}'")
    if not 0 < low <= high:
        raise ConfigValidationError("buckets", f"need 0 < low <= high, got {low},{high}")
    return low, high


def bucket_by_length(items: Sequence[T], boundaries: Tuple[int, int] = LENGTH_BUCKETS,
                     text_of=lambda item: item.document) -> Dict[str, List[T]]:
    """
    Partition items into short/medium/long by the sentence count of their document

    Args:
        items: records carrying a document (DocumentPair by default)
        boundaries: (low, high) sentence counts
        text_of: how to read the document text off an item
    """
    buckets: Dict[str, List[T]] = {name: [] for name in BUCKET_NAMES}
    for item in items:
        buckets[bucket_name(SentenceSplitter.count(text_of(item)), boundaries)].append(item)
    return buckets
