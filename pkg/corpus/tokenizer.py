"""
Word-level tokenizer shared by the seq2seq vocabulary, the topic vocabulary and ROUGE
"""

import re
from typing import List

# a run of word characters, or a single punctuation/symbol character
_TOKEN_PATTERN = re.compile(r"\w+|[^\w\s]", re.UNICODE)
_WORD_PATTERN = re.compile(r"\w", re.UNICODE)


def tokenize(text: str) -> List[str]:
    """
    Lowercase, split on Unicode whitespace, and split punctuation into its own tokens

    Example:
        "The cat sat." -> ["the", "cat", "sat", "."]
    """
    if not text:
        return []
    return _TOKEN_PATTERN.findall(text.lower())


def is_word(token: str) -> bool:
    """True when the token carries at least one letter or digit"""
    return bool(_WORD_PATTERN.search(token))


def detokenize(tokens: List[str]) -> str:
    return " ".join(tokens)
