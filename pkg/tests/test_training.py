"""
Run configuration, validation split and the training loop
"""

import json

import numpy as np
import pytest

from config import ARTIFACT_NAMES
from conftest import micro_run_settings
from corpus.loader import DocumentPair
from evaluation.rouge import rouge_l, rouge_n
from summarizer import TopicAwareSummarizer
from training.trainer import METRIC_COLUMNS, Trainer, train
from utils.errors import ConfigValidationError, EmptyCorpusError
from utils.run_config import RunConfig, split_validation


def _run_config(tmp_path, **overrides) -> RunConfig:
    return RunConfig.from_dict(micro_run_settings(tmp_path / "run", **overrides)).validate()


class TestRunConfig:

    def test_groups_are_split_out(self, tmp_path):
        config = _run_config(tmp_path)
        assert config.epochs == 2
        assert config.model["hidden"] == 8
        assert config.adam == {"learning_rate": 0.01}
        assert config.decode == {"beam_size": 2, "min_len": 0}
        assert config.model_config(30, 10).vocab_size == 30
        assert config.decode_config().max_summary_len == 12

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigValidationError) as exc:
            RunConfig.from_dict(micro_run_settings(tmp_path, hiden=8))
        assert exc.value.field == "hiden"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigValidationError) as exc:
            RunConfig.from_file(tmp_path / "absent.json")
        assert exc.value.field == "config"

    @pytest.mark.parametrize("text", ["{not json", "[1, 2]"])
    def test_unreadable_file(self, tmp_path, text):
        path = tmp_path / "config.json"
        path.write_text(text)
        with pytest.raises(ConfigValidationError) as exc:
            RunConfig.from_file(path)
        assert exc.value.field == "config"

    def test_overrides_skip_none(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps(micro_run_settings(tmp_path)))
        config = RunConfig.from_file(path, {"epochs": 5, "seed": None, "topics": 3})
        assert config.epochs == 5
        assert config.seed == 7
        assert config.model["topics"] == 3

    def test_snapshot_reproduces_the_config(self, tmp_path):
        config = _run_config(tmp_path)
        restored = RunConfig.from_file(config.snapshot(tmp_path / "snapshot.json"))
        assert restored == config

    @pytest.mark.parametrize("overrides,field", [
        ({"train_path": ""}, "train_path"),
        ({"train_path": "/nonexistent/train.jsonl"}, "train_path"),
        ({"epochs": 0}, "epochs"),
        ({"batch_size": 2.5}, "batch_size"),
        ({"validation_fraction": 1.0}, "validation_fraction"),
        ({"heads": 3}, "heads"),
        ({"lambda_": 1.5}, "lambda_"),
        ({"pooling_mode": "max"}, "pooling_mode"),
        ({"learning_rate": 0.0}, "learning_rate"),
        ({"beam_size": 0}, "beam_size"),
    ])
    def test_validate_names_the_field(self, tmp_path, overrides, field):
        with pytest.raises(ConfigValidationError) as exc:
            RunConfig.from_dict(micro_run_settings(tmp_path, **overrides)).validate()
        assert exc.value.field == field


class TestSplitValidation:

    def test_holds_out_a_seeded_fraction(self):
        items = list(range(10))
        train_items, held = split_validation(items, 0.2, seed=4)
        assert len(held) == 2
        assert sorted(train_items + held) == items
        assert split_validation(items, 0.2, seed=4) == (train_items, held)

    def test_keeps_file_order(self):
        train_items, held = split_validation(list(range(20)), 0.25, seed=1)
        assert train_items == sorted(train_items)
        assert held == sorted(held)

    def test_tiny_corpus_has_no_hold_out(self):
        assert split_validation([1, 2, 3, 4, 5], 0.1, seed=0) == ([1, 2, 3, 4, 5], [])


class TestTraining:

    def test_artifacts_and_metrics(self, tmp_path):
        result = train(_run_config(tmp_path), progress=False)
        out = tmp_path / "run"
        for key in ("checkpoint", "config", "vocab", "topic_vocab", "metrics"):
            assert result.artifacts[key] == out / ARTIFACT_NAMES[key]
            assert (out / ARTIFACT_NAMES[key]).exists()

        metrics = result.metrics
        assert list(metrics.columns) == METRIC_COLUMNS
        assert list(metrics["split"]) == ["ntm_pretrain", "train", "train"]
        assert list(result.rows("train")["epoch"]) == [1, 2]
        assert np.isfinite(metrics[["l_ntm", "l_sum", "combined"]].to_numpy()).all()
        assert result.best_epoch in (1, 2)

    def test_validation_rows_when_holding_out(self, tmp_path):
        result = train(_run_config(tmp_path, validation_fraction=0.25, ntm_pretrain_epochs=0), progress=False)
        assert len(result.train_pairs) == 6
        assert len(result.validation_pairs) == 2
        assert list(result.rows("validation")["epoch"]) == [1, 2]
        assert result.best_loss == pytest.approx(result.rows("validation")["combined"].min())

    def test_empty_corpus(self, tmp_path):
        config = _run_config(tmp_path)
        with pytest.raises(EmptyCorpusError):
            train(config, pairs=[], progress=False)
        with pytest.raises(EmptyCorpusError):
            train(config, pairs=[DocumentPair(document="text only .", inference_only=True)], progress=False)

    def test_frozen_encoder_is_untouched(self, tmp_path, tiny_pairs, tiny_vocabs):
        from models.taas import TopicAwareModel

        config = _run_config(tmp_path, freeze_encoder=True, ntm_pretrain_epochs=0)
        vocab, topic_vocab = tiny_vocabs
        model = TopicAwareModel(config.model_config(len(vocab), len(topic_vocab)))
        before = [p.data.copy() for p in model.encoder_parameters()]
        decoder_before = model.seq2seq.output.parameters()[0].data.copy()

        Trainer(model, vocab, topic_vocab, config.adam_config(), batch_size=4, progress=False) \
            .fit(tiny_pairs, [], epochs=2)

        for original, p in zip(before, model.encoder_parameters()):
            np.testing.assert_array_equal(p.data, original)
        assert not np.array_equal(model.seq2seq.output.parameters()[0].data, decoder_before)

    def test_same_seed_same_losses(self, tmp_path):
        first = train(_run_config(tmp_path / "a"), progress=False)
        second = train(_run_config(tmp_path / "b"), progress=False)
        assert first.metrics.equals(second.metrics)


@pytest.mark.slow
def test_overfits_a_tiny_corpus(tmp_path):
    """Summary loss only: eight pairs memorized within 200 epochs"""
    config = _run_config(tmp_path, epochs=200, batch_size=8, hidden=16, ffn_width=32, ntm_pretrain_epochs=0,
                         lambda_=0.0)
    result = train(config, progress=False)
    l_sum = result.rows("train")["l_sum"].to_numpy()
    assert l_sum.min() <= 0.2 * l_sum[0]

    summarizer = TopicAwareSummarizer(result.model, result.vocab, result.topic_vocab, config)
    scores = [rouge_n(summarizer.greedy_summary(p.document), p.summary, 1).f1 for p in result.train_pairs]
    assert np.mean(scores) >= 0.9


@pytest.mark.slow
def test_topic_pooling_keeps_up_with_sum_pooling(tmp_path):
    """Identical runs apart from pooling; greedy ROUGE-L F1 on the training pairs"""
    f1 = {}
    for mode in ("topic", "sum"):
        config = _run_config(tmp_path / mode, epochs=200, batch_size=8, hidden=16, ffn_width=32,
                             ntm_pretrain_epochs=0, lambda_=0.0, pooling_mode=mode)
        result = train(config, progress=False)
        summarizer = TopicAwareSummarizer(result.model, result.vocab, result.topic_vocab, config)
        f1[mode] = np.mean([rouge_l(summarizer.greedy_summary(p.document), p.summary).f1 for p in result.train_pairs])
    # ties and one-token slips on an eight-pair corpus count as keeping up
    assert f1["topic"] >= f1["sum"] - 0.02
