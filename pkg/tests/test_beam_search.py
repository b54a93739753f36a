"""
Greedy and beam decoding against probability tables and brute-force enumeration
"""

import itertools
from typing import Dict, Tuple

import numpy as np
import pytest

from conftest import micro_config
from decoding.beam_search import BeamHypothesis, DecodeConfig, banned_tokens, beam_search, greedy
from models.taas import TopicAwareModel
from utils.errors import ConfigValidationError, DecodeError

EOS = 0
BOS = 99


class TableScorer:
    """Next-token distribution drawn once per prefix from a seeded generator"""

    def __init__(self, vocab: int, seed: int, fixed: Dict[Tuple[int, ...], np.ndarray] = None):
        self.vocab = vocab
        self.rng = np.random.default_rng(seed)
        self.table: Dict[Tuple[int, ...], np.ndarray] = dict(fixed or {})

    def log_probs(self, generated: Tuple[int, ...]) -> np.ndarray:
        if generated not in self.table:
            self.table[generated] = self.rng.dirichlet(np.ones(self.vocab))
        return np.log(self.table[generated])

    def next_log_probs(self, prefixes: np.ndarray) -> np.ndarray:
        return np.stack([self.log_probs(tuple(int(t) for t in row[1:])) for row in np.atleast_2d(prefixes)])


def exhaustive_best(scorer: TableScorer, max_len: int, exponent: float) -> Tuple[int, ...]:
    """Best normalized score over every EOS-terminated or max-length sequence"""
    best_key, best_seq = None, None
    words = [t for t in range(scorer.vocab) if t != EOS]
    for length in range(1, max_len + 1):
        bodies = itertools.product(words, repeat=length - 1)
        sequences = [body + (EOS,) for body in bodies]
        if length == max_len:
            sequences += list(itertools.product(words, repeat=length))
        for seq in sequences:
            log_p = sum(scorer.log_probs(seq[:i])[seq[i]] for i in range(len(seq)))
            key = (-log_p / len(seq) ** exponent, (BOS,) + seq)
            if best_key is None or key < best_key:
                best_key, best_seq = key, seq
    return best_seq


def _config(**overrides) -> DecodeConfig:
    settings = dict(beam_size=2, max_summary_len=4, length_norm_exponent=1.0, min_len=0, no_repeat_ngram_size=0)
    settings.update(overrides)
    return DecodeConfig(**settings)


class TestOracle:

    def test_hand_table(self):
        fixed = {
            (): np.array([0.1, 0.5, 0.4]),
            (1,): np.array([0.6, 0.1, 0.3]),
            (2,): np.array([0.2, 0.1, 0.7]),
        }
        scorer = TableScorer(3, seed=0, fixed=fixed)
        best = beam_search(scorer, _config(beam_size=2, max_summary_len=2), bos_id=BOS, eos_id=EOS)[0]
        assert best.ids == [BOS, 1, EOS]
        assert tuple(best.ids[1:]) == exhaustive_best(scorer, 2, 1.0)

    @pytest.mark.parametrize("exponent", [0.0, 0.5, 1.0])
    def test_full_width_beam_matches_enumeration(self, exponent):
        rng = np.random.default_rng(31)
        for case in range(100):
            vocab, max_len = int(rng.integers(2, 5)), int(rng.integers(1, 5))
            scorer = TableScorer(vocab, seed=case)
            config = _config(beam_size=vocab ** max_len, max_summary_len=max_len, length_norm_exponent=exponent)
            best = beam_search(scorer, config, bos_id=BOS, eos_id=EOS)[0]
            assert tuple(best.ids[1:]) == exhaustive_best(scorer, max_len, exponent), (case, vocab, max_len)

    def test_full_width_beam_dominates_greedy(self):
        for case in range(50):
            scorer = TableScorer(3, seed=100 + case)
            config = _config(beam_size=3 ** 3, max_summary_len=3)
            best = beam_search(scorer, config, bos_id=BOS, eos_id=EOS)[0]
            baseline = greedy(scorer, config, bos_id=BOS, eos_id=EOS)
            assert best.score(1.0) >= baseline.score(1.0) - 1e-12


class TestGreedy:

    def test_equals_width_one_beam_without_length_norm(self):
        for case in range(50):
            scorer = TableScorer(4, seed=500 + case)
            config = _config(beam_size=1, length_norm_exponent=0.0)
            hyp = greedy(scorer, config, bos_id=BOS, eos_id=EOS)
            (beam,) = beam_search(scorer, config, bos_id=BOS, eos_id=EOS)
            assert beam.ids == hyp.ids
            assert beam.log_prob == pytest.approx(hyp.log_prob)

    def test_equals_width_one_beam_on_the_micro_model(self, micro_batch):
        model = TopicAwareModel(micro_config()).eval()
        scorer = model.scorer(micro_batch.ids[:1], micro_batch.mask[:1])
        config = DecodeConfig(beam_size=1, max_summary_len=6, length_norm_exponent=0.0, min_len=0)
        (beam,) = beam_search(scorer, config)
        assert beam.ids == greedy(scorer, config).ids

    def test_stops_at_max_len(self):
        scorer = TableScorer(3, seed=0)
        scorer.log_probs = lambda generated: np.log(np.array([0.01, 0.9, 0.09]))
        hyp = greedy(scorer, _config(max_summary_len=3), bos_id=BOS, eos_id=EOS)
        assert hyp.ids == [BOS, 1, 1, 1]
        assert hyp.finished


class TestConstraints:

    @staticmethod
    def _eos_first():
        scorer = TableScorer(4, seed=0)
        scorer.log_probs = lambda generated: np.log(np.array([0.7, 0.1, 0.15, 0.05]))
        return scorer

    @pytest.mark.parametrize("min_len", [0, 1, 3])
    def test_min_len_holds_back_eos(self, min_len):
        for decode in (greedy, lambda s, c, **kw: beam_search(s, c, **kw)[0]):
            hyp = decode(self._eos_first(), _config(min_len=min_len, max_summary_len=5), bos_id=BOS, eos_id=EOS)
            assert len(hyp.tokens) == min_len
            assert hyp.ids[-1] == EOS

    def test_no_repeat_unigrams(self):
        scorer = TableScorer(4, seed=0)
        scorer.log_probs = lambda generated: np.log(np.array([0.01, 0.6, 0.3, 0.09]))
        for hyp in beam_search(scorer, _config(beam_size=2, no_repeat_ngram_size=1, max_summary_len=4),
                               bos_id=BOS, eos_id=EOS):
            assert len(set(hyp.tokens)) == len(hyp.tokens)

    def test_no_repeat_bigrams(self):
        scorer = TableScorer(3, seed=0)
        scorer.log_probs = lambda generated: np.log(np.array([0.02, 0.49, 0.49]))
        hyp = greedy(scorer, _config(no_repeat_ngram_size=2, max_summary_len=6), bos_id=BOS, eos_id=EOS)
        bigrams = list(zip(hyp.tokens, hyp.tokens[1:]))
        assert len(bigrams) == len(set(bigrams))

    def test_no_admissible_token(self):
        # two words, each usable once, and EOS held back for three steps
        scorer = TableScorer(3, seed=0)
        scorer.log_probs = lambda generated: np.log(np.array([0.2, 0.5, 0.3]))
        config = _config(beam_size=2, min_len=3, max_summary_len=5, no_repeat_ngram_size=1)
        with pytest.raises(DecodeError) as exc:
            greedy(scorer, config, bos_id=BOS, eos_id=EOS)
        assert exc.value.generated == 2
        with pytest.raises(DecodeError):
            beam_search(scorer, config, bos_id=BOS, eos_id=EOS)

    def test_banned_tokens(self):
        assert banned_tokens([BOS, 5, 6, 5], 2) == [6]
        assert banned_tokens([BOS, 5, 6, 5], 1) == [5, 6]
        assert banned_tokens([BOS, 5], 3) == []
        assert banned_tokens([BOS, 5, 6, 5], 0) == []


class TestResults:

    def test_sorted_by_normalized_score(self):
        for case in range(20):
            scorer = TableScorer(4, seed=900 + case)
            hyps = beam_search(scorer, _config(beam_size=3), bos_id=BOS, eos_id=EOS)
            scores = [h.score(1.0) for h in hyps]
            assert 1 <= len(hyps) <= 3
            assert scores == sorted(scores, reverse=True)
            assert all(h.finished for h in hyps)

    def test_hypothesis_length_counts_eos(self):
        hyp = BeamHypothesis(ids=[BOS, 4, 7, EOS], log_prob=-3.0, eos_id=EOS)
        assert hyp.length == 3
        assert hyp.tokens == [4, 7]
        assert hyp.score(1.0) == pytest.approx(-1.0)
        assert hyp.score(0.0) == pytest.approx(-3.0)


class TestDecodeConfig:

    @pytest.mark.parametrize("overrides,field", [
        ({"beam_size": 0}, "beam_size"),
        ({"max_summary_len": 0, "min_len": 0}, "max_summary_len"),
        ({"min_len": 9, "max_summary_len": 4}, "min_len"),
        ({"length_norm_exponent": -0.5}, "length_norm_exponent"),
        ({"no_repeat_ngram_size": -1}, "no_repeat_ngram_size"),
    ])
    def test_invalid(self, overrides, field):
        with pytest.raises(ConfigValidationError) as exc:
            _config(**overrides)
        assert exc.value.field == field
