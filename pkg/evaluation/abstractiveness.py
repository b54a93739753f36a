"""
How much of a summary is rewritten rather than copied
"""

from evaluation.rouge import ngram_counts, rouge_tokens


def novel_ngram_ratio(summary: str, document: str, n: int = 1) -> float:
    """Fraction of the summary's n-grams that never occur in the document; 0 for an empty summary"""
    summary_ngrams = ngram_counts(rouge_tokens(summary), n)
    total = sum(summary_ngrams.values())
    if not total:
        return 0.0
    document_ngrams = ngram_counts(rouge_tokens(document), n)
    novel = sum(count for gram, count in summary_ngrams.items() if gram not in document_ngrams)
    return novel / total
