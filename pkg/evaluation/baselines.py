"""
Extractive reference baseline
"""

from utils.sentences import SentenceSplitter

LEAD_SENTENCES = 3


def lead3(document: str, sentences: int = LEAD_SENTENCES) -> str:
    """First three sentences verbatim, fewer for shorter documents"""
    return " ".join(SentenceSplitter.split_text(document)[:sentences])
