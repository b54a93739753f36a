"""
Evaluation: ROUGE, Lead-3, length buckets, abstractiveness and reports
"""
from .rouge import RougeScore, rouge_n, rouge_l, rouge_all
from .baselines import lead3
from .buckets import bucket_by_length, bucket_name, parse_boundaries
from .abstractiveness import novel_ngram_ratio
from .report import EvalReport, score_corpus, format_summary, write_reports, match_ids

__all__ = [
    'RougeScore', 'rouge_n', 'rouge_l', 'rouge_all',
    'lead3', 'bucket_by_length', 'bucket_name', 'parse_boundaries',
    'novel_ngram_ratio',
    'EvalReport', 'score_corpus', 'format_summary', 'write_reports', 'match_ids',
]
