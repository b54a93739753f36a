"""
Decoding: greedy and beam search summary generation
"""
from .beam_search import BeamHypothesis, DecodeConfig, NextTokenScorer, beam_search, greedy, banned_tokens

__all__ = ['BeamHypothesis', 'DecodeConfig', 'NextTokenScorer', 'beam_search', 'greedy', 'banned_tokens']
