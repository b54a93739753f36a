"""
Training loop
An optional topic-model warm-up fits the NTM alone on the BoW view; the joint
phase then runs the full pipeline per batch (beta, topic projection, encoder,
topic attention, pooled s, decoder) and updates every unfrozen parameter with
Adam. Per-epoch losses go to a metrics table; the best epoch's parameters are
kept and checkpointed.
"""

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import ARTIFACT_NAMES
from corpus.batching import Batch, make_batches
from corpus.loader import DocumentPair, read_pairs
from corpus.vocab import TopicVocabulary, Vocabulary, build_vocab, load_stopwords
from models.taas import LossBreakdown, TopicAwareModel
from numeric.checkpoint import save_checkpoint
from numeric.optim import Adam, AdamConfig
from numeric.tensor import backward, no_grad
from utils.errors import EmptyCorpusError, TrainingDivergedError
from utils.run_config import RunConfig, split_validation

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ["epoch", "split", "l_ntm", "l_sum", "combined"]


@dataclass
class TrainingResult:
    metrics: pd.DataFrame
    best_epoch: int
    best_loss: float
    checkpoint_path: Optional[Path] = None
    artifacts: Dict[str, Path] = field(default_factory=dict)
    model: Optional[TopicAwareModel] = None
    vocab: Optional[Vocabulary] = None
    topic_vocab: Optional[TopicVocabulary] = None
    train_pairs: List[DocumentPair] = field(default_factory=list)
    validation_pairs: List[DocumentPair] = field(default_factory=list)

    def rows(self, split: str) -> pd.DataFrame:
        return self.metrics[self.metrics["split"] == split]


def _mean_breakdown(breakdowns: Sequence[LossBreakdown], weights: Sequence[int]) -> Dict[str, float]:
    total = float(sum(weights))
    return {
        key: sum(getattr(b, key) * w for b, w in zip(breakdowns, weights)) / total
        for key in ("l_ntm", "l_sum", "combined")
    }


class Trainer:
    """Runs warm-up and joint epochs over fixed vocabularies"""

    def __init__(self, model: TopicAwareModel, vocab: Vocabulary, topic_vocab: TopicVocabulary,
                 adam: AdamConfig, batch_size: int, progress: bool = True):
        self.model = model
        self.vocab = vocab
        self.topic_vocab = topic_vocab
        self.adam = adam
        self.batch_size = batch_size
        self.progress = progress
        self.rows: List[Dict[str, object]] = []

    def _batches(self, pairs: Sequence[DocumentPair], shuffle_seed: Optional[int]) -> List[Batch]:
        cfg = self.model.config
        return make_batches(pairs, self.vocab, self.topic_vocab, batch_size=self.batch_size,
                            max_len=cfg.max_len, shuffle_seed=shuffle_seed,
                            max_summary_len=cfg.max_summary_len)

    def _log_row(self, epoch: int, split: str, values: Dict[str, float]) -> None:
        self.rows.append({"epoch": epoch, "split": split, **values})

    # ---- topic-model warm-up ----
    def pretrain_ntm(self, pairs: Sequence[DocumentPair], epochs: int) -> None:
        if epochs <= 0:
            return
        ntm = self.model.ntm
        optimizer = Adam(self.model.ntm_parameters(), self.adam)
        self.model.train()
        for epoch in range(1, epochs + 1):
            losses, sizes = [], []
            batches = self._batches(pairs, shuffle_seed=self.model.config.seed + epoch)
            for b, batch in enumerate(tqdm(batches, desc=f"ntm warm-up {epoch}", disable=not self.progress,
                                           leave=False)):
                self.model.zero_grad()
                loss = ntm.loss(batch.bow, sample=True)
                value = loss.item()
                if not math.isfinite(value):
                    raise TrainingDivergedError(epoch, b, {"l_ntm": value})
                backward(loss)
                optimizer.step()
                losses.append(value)
                sizes.append(batch.size)
            l_ntm = float(np.average(losses, weights=sizes))
            self._log_row(epoch, "ntm_pretrain", {"l_ntm": l_ntm, "l_sum": 0.0, "combined": l_ntm})
            logger.info(f"ntm warm-up epoch {epoch}: l_ntm={l_ntm:.4f}")

    # ---- joint phase ----
    def train_epoch(self, pairs: Sequence[DocumentPair], epoch: int, optimizer: Adam) -> Dict[str, float]:
        self.model.train()
        breakdowns, sizes = [], []
        batches = self._batches(pairs, shuffle_seed=self.model.config.seed + epoch)
        for b, batch in enumerate(tqdm(batches, desc=f"epoch {epoch}", disable=not self.progress, leave=False)):
            self.model.zero_grad()
            breakdown = self.model.loss(batch)
            values = breakdown.to_dict()
            if not all(math.isfinite(v) for v in values.values()):
                raise TrainingDivergedError(epoch, b, values)
            backward(breakdown.objective)
            optimizer.step()
            breakdowns.append(breakdown)
            sizes.append(batch.size)
        return _mean_breakdown(breakdowns, sizes)

    def evaluate(self, pairs: Sequence[DocumentPair]) -> Dict[str, float]:
        """Losses in eval mode: no dropout, omega = mu"""
        self.model.eval()
        breakdowns, sizes = [], []
        with no_grad():
            for batch in self._batches(pairs, shuffle_seed=None):
                breakdowns.append(self.model.loss(batch))
                sizes.append(batch.size)
        self.model.train()
        return _mean_breakdown(breakdowns, sizes)

    def fit(self, train_pairs: Sequence[DocumentPair], validation_pairs: Sequence[DocumentPair],
            epochs: int, checkpoint_path: Optional[Path] = None) -> TrainingResult:
        """
        Warm-up, then `epochs` joint epochs; parameters end at the best epoch's values

        Raises:
            EmptyCorpusError: no training pairs
            TrainingDivergedError: a loss became NaN or infinite
        """
        if not train_pairs:
            raise EmptyCorpusError("cannot train on an empty corpus")
        cfg = self.model.config
        self.pretrain_ntm(train_pairs, cfg.ntm_pretrain_epochs)

        optimizer = Adam(self.model.trainable_parameters(), self.adam)
        logger.info(f"joint training: {len(optimizer.parameters)} of {len(self.model.parameters())} "
                    f"parameter tensors trainable, lambda={cfg.lambda_}")
        monitor = "validation" if validation_pairs else "train"
        best_loss, best_epoch, best_state = math.inf, 0, None

        for epoch in range(1, epochs + 1):
            train_values = self.train_epoch(train_pairs, epoch, optimizer)
            self._log_row(epoch, "train", train_values)
            monitored = train_values
            message = (f"epoch {epoch}: train l_ntm={train_values['l_ntm']:.4f} "
                       f"l_sum={train_values['l_sum']:.4f} combined={train_values['combined']:.4f}")
            if validation_pairs:
                monitored = self.evaluate(validation_pairs)
                self._log_row(epoch, "validation", monitored)
                message += f" | validation combined={monitored['combined']:.4f}"
            logger.info(message)

            if monitored["combined"] < best_loss:
                best_loss, best_epoch = monitored["combined"], epoch
                best_state = {name: (p.data.copy(), p.step_count) for name, p in self.model.named_parameters()}
                if checkpoint_path is not None:
                    save_checkpoint(checkpoint_path, dict(self.model.named_parameters()), cfg.seed)

        if best_state is not None:
            for name, p in self.model.named_parameters():
                p.data[...], p.step_count = best_state[name]
        logger.info(f"best {monitor} combined loss {best_loss:.4f} at epoch {best_epoch}")
        metrics = pd.DataFrame(self.rows, columns=METRIC_COLUMNS)
        return TrainingResult(metrics=metrics, best_epoch=best_epoch, best_loss=best_loss,
                              checkpoint_path=checkpoint_path)


def build_vocabularies(pairs: Sequence[DocumentPair], config: RunConfig):
    vocab = build_vocab(pairs, config.vocab_cap, config.min_count)
    topic_vocab = TopicVocabulary.build(pairs, config.topic_vocab_cap, config.min_count,
                                        stopwords=load_stopwords(config.stopwords_path))
    return vocab, topic_vocab


def train(config: RunConfig, pairs: Optional[Sequence[DocumentPair]] = None,
          progress: bool = True) -> TrainingResult:
    """
    Full training run: corpus, vocabularies, model, epochs and artifacts

    Writes the checkpoint, config snapshot, both vocabularies and the metrics
    CSV into config.output_dir.

    Args:
        config: validated run configuration
        pairs: training pairs; read from config.train_path when omitted
    """
    if pairs is None:
        pairs = read_pairs(config.train_path)
    pairs = [p for p in pairs if not p.inference_only]
    if not pairs:
        raise EmptyCorpusError(f"no training pairs with summaries in {config.train_path or 'input'}")

    if config.validation_path:
        train_pairs = list(pairs)
        validation_pairs = [p for p in read_pairs(config.validation_path) if not p.inference_only]
    else:
        train_pairs, validation_pairs = split_validation(pairs, config.validation_fraction, config.seed)

    vocab, topic_vocab = build_vocabularies(train_pairs, config)
    model_config = config.model_config(len(vocab), len(topic_vocab))
    model = TopicAwareModel(model_config)
    logger.info(f"model: {model.parameter_count()} parameters, pooling={model_config.pooling_mode}")

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    artifacts = {
        "config": config.snapshot(out / ARTIFACT_NAMES["config"]),
        "vocab": vocab.save(out / ARTIFACT_NAMES["vocab"]),
        "topic_vocab": topic_vocab.save(out / ARTIFACT_NAMES["topic_vocab"]),
    }

    trainer = Trainer(model, vocab, topic_vocab, config.adam_config(), config.batch_size, progress=progress)
    result = trainer.fit(train_pairs, validation_pairs, config.epochs,
                         checkpoint_path=out / ARTIFACT_NAMES["checkpoint"])
    metrics_path = out / ARTIFACT_NAMES["metrics"]
    result.metrics.to_csv(metrics_path, index=False)
    artifacts["checkpoint"] = result.checkpoint_path
    artifacts["metrics"] = metrics_path
    result.artifacts = artifacts
    result.model = model
    result.vocab, result.topic_vocab = vocab, topic_vocab
    result.train_pairs, result.validation_pairs = list(train_pairs), list(validation_pairs)
    return result
