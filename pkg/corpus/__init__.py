"""
Corpus package: JSONL loading, tokenization, vocabularies, BoW and batching
"""
from .loader import DocumentPair, load_jsonl, read_pairs, read_summaries, write_jsonl
from .tokenizer import tokenize, detokenize
from .vocab import Vocabulary, TopicVocabulary, build_vocab, load_stopwords
from .batching import Batch, make_batches, to_bow

__all__ = [
    'DocumentPair', 'load_jsonl', 'read_pairs', 'read_summaries', 'write_jsonl',
    'tokenize', 'detokenize',
    'Vocabulary', 'TopicVocabulary', 'build_vocab', 'load_stopwords',
    'Batch', 'make_batches', 'to_bow',
]
