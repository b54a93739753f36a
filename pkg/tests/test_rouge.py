"""
ROUGE-1/2/L against hand examples and brute-force oracles
"""

import itertools
from collections import Counter

import numpy as np
import pytest

from evaluation.rouge import RougeScore, lcs_length, lcs_positions, rouge_all, rouge_l, rouge_n, rouge_tokens

ALPHABET = ("a", "b", "c")


def brute_ngram_overlap(candidate, reference, n):
    """Greedy one-to-one matching of n-gram occurrences"""
    remaining = [tuple(reference[i:i + n]) for i in range(len(reference) - n + 1)]
    matched = 0
    for i in range(len(candidate) - n + 1):
        gram = tuple(candidate[i:i + n])
        if gram in remaining:
            remaining.remove(gram)
            matched += 1
    return matched


def is_subsequence(short, long):
    it = iter(long)
    return all(token in it for token in short)


def brute_lcs(x, y):
    """Longest subsequence of x, by exhaustive search from the longest length down"""
    for length in range(len(x), 0, -1):
        for picks in itertools.combinations(range(len(x)), length):
            if is_subsequence([x[i] for i in picks], y):
                return length
    return 0


def _expected(overlap, candidate_count, reference_count):
    precision = overlap / candidate_count if candidate_count else 0.0
    recall = overlap / reference_count if reference_count else 0.0
    return precision, recall


class TestHandExamples:

    def test_cat_sat_cat_ate(self):
        r1 = rouge_n("the cat sat", "the cat ate", 1)
        assert r1.precision == pytest.approx(2 / 3)
        assert r1.f1 == pytest.approx(2 / 3)
        assert rouge_n("the cat sat", "the cat ate", 2).f1 == pytest.approx(1 / 2)

    def test_crossed_order_lcs(self):
        score = rouge_l("a b c d", "a c b d")
        assert score.precision == pytest.approx(3 / 4)
        assert score.recall == pytest.approx(3 / 4)

    def test_identical_texts_score_one(self):
        for score in rouge_all("Storm cuts power. Crews respond.", "Storm cuts power. Crews respond."):
            assert score.f1 == pytest.approx(1.0)

    def test_union_lcs_across_sentences(self):
        score = rouge_l("a b f g h. a c h i e.", "a b c d e.")
        assert score.recall == pytest.approx(4 / 5)
        assert score.precision == pytest.approx(4 / 10)

    def test_union_lcs_clips_repeated_hits(self):
        # both reference sentences hit the single "a" of the candidate
        score = rouge_l("a.", "a b. a c.")
        assert score.recall == pytest.approx(1 / 4)
        assert score.precision == pytest.approx(1.0)

    def test_reference_sentence_spans_candidate_sentences(self):
        score = rouge_l("a. a b", "a a b")
        assert score.recall == pytest.approx(1.0)
        assert score.precision == pytest.approx(1.0)

    def test_reference_inside_a_longer_multi_sentence_candidate(self):
        score = rouge_l("the storm hit. power was cut on the island.", "storm cut island.")
        assert score.recall == pytest.approx(1.0)
        assert score.precision == pytest.approx(3 / 9)

    def test_clipped_unigrams(self):
        assert rouge_n("the the the", "the cat", 1).precision == pytest.approx(1 / 3)


class TestEdgeCases:

    @pytest.mark.parametrize("candidate,reference", [("", "a b"), ("a b", ""), ("", ""), ("...", "a")])
    def test_empty_side_scores_zero(self, candidate, reference):
        for score in rouge_all(candidate, reference):
            assert score == RougeScore(0.0, 0.0, 0.0)

    def test_punctuation_is_ignored(self):
        assert rouge_tokens("Hello, world!") == ["hello", "world"]
        assert rouge_n("hello world", "Hello, world!").f1 == pytest.approx(1.0)

    def test_bigrams_need_two_tokens(self):
        assert rouge_n("a", "a", 2).f1 == 0.0

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            rouge_n("a", "a", 0)

    def test_lcs_positions_lie_on_a_common_subsequence(self):
        x, y = list("abcbdab"), list("bdcaba")
        hits = lcs_positions(x, y)
        assert len(hits) == lcs_length(x, y) == 4
        assert is_subsequence([x[i] for i in sorted(hits)], y)


def test_oracle_equivalence_on_random_strings():
    """10,000 random pairs, length <= 10 over a 3-token alphabet"""
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        candidate = [ALPHABET[i] for i in rng.integers(0, 3, size=rng.integers(0, 11))]
        reference = [ALPHABET[i] for i in rng.integers(0, 3, size=rng.integers(0, 11))]

        for n in (1, 2):
            score = rouge_n(candidate, reference, n)
            expected = _expected(brute_ngram_overlap(candidate, reference, n),
                                 max(len(candidate) - n + 1, 0), max(len(reference) - n + 1, 0))
            assert (score.precision, score.recall) == expected, (candidate, reference, n)

        overlap = brute_lcs(candidate, reference)
        expected = _expected(overlap, len(candidate), len(reference))
        assert (rouge_l(candidate, reference).precision, rouge_l(candidate, reference).recall) == expected
        whole = rouge_l(candidate, reference, summary_level=False)
        assert (whole.precision, whole.recall) == expected


def test_subsequence_reference_has_full_recall_across_sentence_breaks():
    """Candidates with random sentence breaks, references drawn as subsequences"""
    rng = np.random.default_rng(23)
    for _ in range(2000):
        words = [ALPHABET[i] for i in rng.integers(0, 3, size=rng.integers(1, 12))]
        candidate = []
        for word in words:
            candidate.append(word)
            if rng.random() < 0.3:
                candidate.append(".")
        keep = rng.random(len(words)) < 0.6
        keep[rng.integers(0, len(words))] = True
        reference = [w for w, k in zip(words, keep) if k]
        assert rouge_l(candidate, reference).recall == 1.0, (candidate, reference)


def test_ngram_counter_matches_clipping_definition():
    candidate, reference = list("aabbc"), list("abbbc")
    clipped = sum((Counter(candidate) & Counter(reference)).values())
    assert rouge_n(candidate, reference, 1).precision == clipped / len(candidate)
