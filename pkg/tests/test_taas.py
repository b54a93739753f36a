"""
Joint model: loss mixing, pooling modes, parameter groups and the full-pipeline gradient check
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import micro_config
from models.taas import TopicAwareModel, combine_losses
from numeric.gradcheck import check_gradients
from numeric.tensor import no_grad
from utils.errors import ConfigValidationError

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
loss_value = st.floats(min_value=0.0, max_value=50.0, allow_nan=False)


class TestCombineLosses:

    @given(loss_value, loss_value, unit)
    def test_identity(self, l_ntm, l_sum, lam):
        combined = combine_losses(l_ntm, l_sum, lam)
        if lam == 0.0:
            assert combined == l_sum
        elif lam == 1.0:
            assert combined == l_ntm
        else:
            assert combined == lam * l_ntm + (1.0 - lam) * l_sum

    def test_boundaries_return_one_term_exactly(self):
        assert combine_losses(3.7, 1.1, 0.0) == 1.1
        assert combine_losses(3.7, 1.1, 1.0) == 3.7


class TestModelLoss:

    def test_random_lambdas_through_the_model(self, micro_batch):
        model = TopicAwareModel(micro_config()).eval()
        rng = np.random.default_rng(5)
        for lam in rng.random(100):
            model.config.lambda_ = float(lam)
            with no_grad():
                breakdown = model.loss(micro_batch)
            assert breakdown.combined == lam * breakdown.l_ntm + (1.0 - lam) * breakdown.l_sum

    @pytest.mark.parametrize("lam,field", [(0.0, "l_sum"), (1.0, "l_ntm")])
    def test_boundary_lambdas(self, micro_batch, lam, field):
        model = TopicAwareModel(micro_config(lambda_=lam)).eval()
        with no_grad():
            breakdown = model.loss(micro_batch)
        assert breakdown.combined == getattr(breakdown, field)
        assert breakdown.objective.item() == getattr(breakdown, field)

    def test_seeded_construction_is_deterministic(self, micro_batch):
        first = TopicAwareModel(micro_config()).eval()
        second = TopicAwareModel(micro_config()).eval()
        with no_grad():
            assert first.loss(micro_batch).combined == second.loss(micro_batch).combined


class TestPoolingModes:

    def test_parameter_shapes_do_not_depend_on_mode(self):
        shapes = {
            mode: [(name, p.shape) for name, p in TopicAwareModel(micro_config(pooling_mode=mode)).named_parameters()]
            for mode in ("topic", "cls", "sum")
        }
        assert shapes["topic"] == shapes["cls"] == shapes["sum"]

    @pytest.mark.parametrize("mode", ["topic", "cls", "sum"])
    def test_s_has_hidden_width(self, micro_batch, mode):
        model = TopicAwareModel(micro_config(pooling_mode=mode)).eval()
        with no_grad():
            conditioning = model.condition(micro_batch.ids, micro_batch.mask)
        assert conditioning.s.shape == (2, 8)
        assert (conditioning.attention is not None) == (mode == "topic")

    def test_cls_mode_uses_first_row(self, micro_batch):
        model = TopicAwareModel(micro_config(pooling_mode="cls")).eval()
        with no_grad():
            conditioning = model.condition(micro_batch.ids, micro_batch.mask)
        np.testing.assert_array_equal(conditioning.s.data, conditioning.encoded.h.data[:, 0])


class TestParameterGroups:

    def test_freeze_flags(self):
        model = TopicAwareModel(micro_config(freeze_encoder=True, freeze_ntm=True))
        trainable = {id(p) for p in model.trainable_parameters()}
        assert not trainable & {id(p) for p in model.encoder_parameters()}
        assert not trainable & {id(p) for p in model.ntm_parameters()}
        assert trainable >= {id(p) for p in model.topic_attention.parameters()}
        assert trainable >= {id(p) for p in model.seq2seq.output.parameters()}

    def test_nothing_frozen(self):
        model = TopicAwareModel(micro_config(freeze_encoder=False, freeze_ntm=False))
        assert len(model.trainable_parameters()) == len(model.parameters())

    def test_encoder_group_includes_token_embeddings(self):
        model = TopicAwareModel(micro_config())
        assert any(p is model.seq2seq.embedding.weight for p in model.encoder_parameters())

    def test_groups_cover_every_parameter_once(self):
        model = TopicAwareModel(micro_config())
        grouped = [name for members in model.parameter_groups().values() for name, _ in members]
        assert sorted(grouped) == sorted(name for name, _ in model.named_parameters())
        assert "seq2seq.encoder_layers.0" in model.parameter_groups()


class TestModelConfig:

    @pytest.mark.parametrize("variant,expected", [("paper", "residual_ln"), ("residual_ln", "residual_ln"),
                                                  ("post_ln", "post_ln")])
    def test_projection_variant_names(self, variant, expected):
        config = micro_config(projection_variant=variant)
        assert config.projection_variant == expected
        assert TopicAwareModel(config).topic_attention.projection.variant == expected

    def test_unknown_projection_variant(self):
        with pytest.raises(ConfigValidationError) as exc:
            micro_config(projection_variant="pre_ln")
        assert exc.value.field == "projection_variant"


class TestInference:

    def test_scorer_returns_log_distributions(self, micro_batch):
        model = TopicAwareModel(micro_config()).eval()
        scorer = model.scorer(micro_batch.ids[:1], micro_batch.mask[:1])
        log_probs = scorer.next_log_probs(np.array([[2], [2]]))
        assert log_probs.shape == (2, 12)
        np.testing.assert_allclose(np.exp(log_probs).sum(axis=1), 1.0, atol=1e-12)
        np.testing.assert_array_equal(log_probs[0], log_probs[1])

    def test_attention_profiles(self, micro_batch):
        model = TopicAwareModel(micro_config()).eval()
        alpha_hat, profile = model.attention_profiles(micro_batch.ids, micro_batch.mask)
        assert alpha_hat.shape == profile.shape == micro_batch.ids.shape
        np.testing.assert_allclose(alpha_hat.sum(axis=1), 1.0, atol=1e-9)
        assert np.all(alpha_hat[~micro_batch.mask] == 0.0)


@pytest.mark.parametrize("pooling,injection", [("topic", "memory_slot"), ("cls", "embedding")])
def test_full_pipeline_gradients(micro_batch, pooling, injection):
    """beta -> projection -> encoder -> attention -> s -> decoder, both losses active"""
    model = TopicAwareModel(micro_config(lambda_=0.5, pooling_mode=pooling, injection=injection)).train()
    noise = np.random.default_rng(9).standard_normal((2, model.config.latent_dim))
    report = check_gradients(
        lambda: model.loss(micro_batch, ntm_noise=noise).objective,
        dict(model.named_parameters()),
        max_coordinates=50,
        rng=np.random.default_rng(1),
    )
    assert all(len(checks) == min(50, p.size) for (name, checks), p in
               zip(report.groups.items(), model.parameters()))
    assert report.passed, {name: checks[:3] for name, checks in report.failures().items()}
