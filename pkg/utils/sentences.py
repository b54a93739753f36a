"""
Sentence splitting by terminal punctuation
Abbreviation-blind: "Dr. Smith" counts as two sentences.
"""

import re
from typing import List, Sequence

from config import SENTENCE_TERMINATORS


class SentenceSplitter:
    """Splits raw text or token lists on '.', '!' and '?'"""

    _TEXT_PATTERN = re.compile(r"[^.!?]*[.!?]+|[^.!?]+$")

    @staticmethod
    def split_text(text: str) -> List[str]:
        """
        Split text into sentences, keeping each sentence's terminator

        Returns:
            Stripped, non-empty sentences in order
        """
        if not text:
            return []
        pieces = (m.group(0).strip() for m in SentenceSplitter._TEXT_PATTERN.finditer(text))
        return [p for p in pieces if p and any(ch.isalnum() for ch in p)]

    @staticmethod
    def split_tokens(tokens: Sequence[str]) -> List[List[str]]:
        """Group tokens into sentences; terminator tokens close a sentence and are kept"""
        sentences: List[List[str]] = []
        current: List[str] = []
        for token in tokens:
            current.append(token)
            if token in SENTENCE_TERMINATORS:
                sentences.append(current)
                current = []
        if current:
            sentences.append(current)
        return sentences

    @staticmethod
    def count(text: str) -> int:
        return len(SentenceSplitter.split_text(text))
