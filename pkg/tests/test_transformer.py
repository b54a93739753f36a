"""
Encoder-decoder shapes, masking, causality and s injection
"""

import numpy as np
import pytest

from conftest import micro_config
from models.transformer import Seq2SeqTransformer, received_attention
from numeric.tensor import Tensor, no_grad
from utils.errors import ContractError, SequenceTooLongError


def _model(**overrides):
    config = micro_config(**overrides)
    return Seq2SeqTransformer(config, np.random.default_rng(config.seed)).eval()


def _ids(rng, batch, length, vocab=12):
    return rng.integers(5, vocab, size=(batch, length))


class TestEncoder:

    def test_output_shape(self, rng):
        model = _model()
        ids = _ids(rng, 2, 6)
        with no_grad():
            encoded = model.encode(ids, np.ones_like(ids, dtype=bool))
        assert encoded.h.shape == (2, 6, 8)
        assert encoded.pad_mask.shape == (2, 6)

    def test_repeatable(self, rng):
        model = _model()
        ids = _ids(rng, 1, 1)
        mask = np.ones_like(ids, dtype=bool)
        with no_grad():
            np.testing.assert_array_equal(model.encode(ids, mask).h.data, model.encode(ids, mask).h.data)

    def test_permutation_equivariance_without_positions(self, rng):
        model = _model(position_encoding=False)
        ids = _ids(rng, 1, 5)
        mask = np.ones_like(ids, dtype=bool)
        order = np.array([3, 1, 4, 0, 2])
        with no_grad():
            base = model.encode(ids, mask).h.data
            permuted = model.encode(ids[:, order], mask).h.data
        np.testing.assert_allclose(permuted, base[:, order], atol=1e-10)

    def test_padding_does_not_leak_into_real_rows(self, rng):
        model = _model()
        ids = _ids(rng, 1, 4)
        padded = np.concatenate([ids, np.zeros((1, 2), dtype=np.int64)], axis=1)
        mask = np.array([[True] * 4 + [False] * 2])
        with no_grad():
            short = model.encode(ids, np.ones_like(ids, dtype=bool)).h.data
            long = model.encode(padded, mask).h.data
        np.testing.assert_allclose(long[:, :4], short, atol=1e-10)

    def test_attention_rows_sum_to_one_over_real_keys(self, rng):
        model = _model()
        ids = _ids(rng, 2, 5)
        mask = np.array([[True] * 5, [True, True, True, False, False]])
        with no_grad():
            model.encode(ids, mask)
        weights = model.encoder_layers[0].self_attention.last_weights
        np.testing.assert_allclose(weights.sum(axis=-1), 1.0, atol=1e-12)
        assert np.all(weights[1, :, :, 3:] == 0.0)

    def test_overlength_input(self, rng):
        model = _model()
        ids = _ids(rng, 1, 17)
        with pytest.raises(SequenceTooLongError):
            model.encode(ids, np.ones_like(ids, dtype=bool))

    def test_self_attention_profile_is_distribution(self, rng):
        model = _model()
        ids = _ids(rng, 1, 6)
        mask = np.array([[True] * 4 + [False] * 2])
        with no_grad():
            model.encode(ids, mask)
        profile = model.self_attention_profile()
        assert profile.shape == (1, 6)
        assert profile[0, 4:].sum() == 0.0
        assert profile.sum() == pytest.approx(1.0)


def test_received_attention_counts_column_mass():
    weights = np.array([[[0.5, 0.5, 0.0], [1.0, 0.0, 0.0], [0.2, 0.2, 0.6]]])
    profile = received_attention(weights, np.array([[True, True, False]]))
    np.testing.assert_allclose(profile, [[0.75, 0.25, 0.0]])


class TestDecoder:

    def _encoded(self, model, rng, length=5):
        ids = _ids(rng, 1, length)
        with no_grad():
            return model.encode(ids, np.ones_like(ids, dtype=bool))

    def test_logits_shape(self, rng):
        model = _model()
        encoded = self._encoded(model, rng)
        s = Tensor(rng.normal(size=(1, 8)))
        with no_grad():
            assert model.decode(np.array([[2, 7, 8]]), encoded, s).shape == (1, 3, 12)
            assert model.decode_step(np.array([2, 7]), encoded, s).shape == (1, 12)

    def test_causality(self, rng):
        model = _model()
        encoded = self._encoded(model, rng)
        s = Tensor(rng.normal(size=(1, 8)))
        for _ in range(20):
            prefix = np.concatenate([[2], rng.integers(5, 12, size=5)])[None, :]
            j = int(rng.integers(1, 6))
            changed = prefix.copy()
            changed[0, j] = 5 + (changed[0, j] - 5 + 1) % 7
            with no_grad():
                before = model.decode(prefix, encoded, s).data
                after = model.decode(changed, encoded, s).data
            np.testing.assert_array_equal(before[:, :j], after[:, :j])
            assert not np.allclose(before[:, j:], after[:, j:])

    @pytest.mark.parametrize("injection", ["memory_slot", "embedding"])
    def test_s_conditions_the_logits(self, rng, injection):
        model = _model(injection=injection)
        encoded = self._encoded(model, rng)
        s = Tensor(rng.normal(size=(1, 8)) * 3)
        prefix = np.array([[2, 6, 9]])
        with no_grad():
            with_s = model.decode(prefix, encoded, s).data
            zeroed = model.decode(prefix, encoded, Tensor(np.zeros((1, 8)))).data
        assert not np.allclose(with_s, zeroed)

    def test_empty_prefix(self, rng):
        model = _model()
        encoded = self._encoded(model, rng)
        with pytest.raises(ContractError):
            model.decode_step(np.zeros((1, 0), dtype=np.int64), encoded, None)

    def test_overlong_prefix(self, rng):
        model = _model()
        encoded = self._encoded(model, rng)
        with pytest.raises(SequenceTooLongError):
            model.decode(np.full((1, 10), 6), encoded, None)
