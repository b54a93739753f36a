"""
Joint topic-aware summarization model
beta comes from the topic model, topic attention pools the encoder states
into s, and the decoder is conditioned on s. The training objective mixes
the topic-model loss and the summary cross-entropy with weight lambda.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from corpus.batching import Batch
from models.config import ModelConfig
from models.ntm import NeuralTopicModel
from models.pooling import POOLERS, EncoderOutput, pool
from models.topic_attention import TopicAttention, TopicAttentionWeights
from models.transformer import Seq2SeqTransformer
from numeric import functional as F
from numeric.module import Module
from numeric.optim import Parameter
from numeric.tensor import Tensor, no_grad

logger = logging.getLogger(__name__)


@dataclass
class LossBreakdown:
    """Scalar losses of one batch; `objective` is the tensor backward() runs on"""
    l_ntm: float
    l_sum: float
    combined: float
    lambda_: float
    objective: Optional[Tensor] = None

    def to_dict(self) -> Dict[str, float]:
        return {"l_ntm": self.l_ntm, "l_sum": self.l_sum, "combined": self.combined}


def combine_losses(l_ntm: float, l_sum: float, lambda_: float) -> float:
    """lambda * L_NTM + (1 - lambda) * L_SUM; the boundaries return one term untouched"""
    if lambda_ == 0.0:
        return l_sum
    if lambda_ == 1.0:
        return l_ntm
    return lambda_ * l_ntm + (1.0 - lambda_) * l_sum


@dataclass
class Conditioning:
    encoded: EncoderOutput
    s: Tensor                                    # (B, H)
    attention: Optional[TopicAttentionWeights]   # only for topic pooling


class TopicAwareModel(Module):
    """Topic model + topic attention + transformer under one parameter namespace"""

    def __init__(self, config: ModelConfig, rng: Optional[np.random.Generator] = None):
        super().__init__()
        self.config = config
        self.rng = rng if rng is not None else np.random.default_rng(config.seed)
        self.ntm = NeuralTopicModel(
            config.topic_vocab_size, config.topics, config.latent_dim, config.ntm_hidden, self.rng
        )
        # built in every pooling mode so parameter shapes do not depend on the mode
        self.topic_attention = TopicAttention(
            config.topic_vocab_size, config.hidden, self.rng, config.projection_variant
        )
        self.seq2seq = Seq2SeqTransformer(config, self.rng)

    # ---- parameter groups ----
    def ntm_parameters(self) -> List[Parameter]:
        return self.ntm.parameters()

    def encoder_parameters(self) -> List[Parameter]:
        return self.seq2seq.encoder_parameters()

    def trainable_parameters(self) -> List[Parameter]:
        """Everything Adam updates in the joint phase, honoring the freeze flags"""
        frozen = set()
        if self.config.freeze_encoder:
            frozen.update(id(p) for p in self.encoder_parameters())
        if self.config.freeze_ntm:
            frozen.update(id(p) for p in self.ntm_parameters())
        return [p for p in self.parameters() if id(p) not in frozen]

    def parameter_groups(self) -> Dict[str, List[Tuple[str, Parameter]]]:
        """Named parameters keyed by top-level component and layer"""
        groups: Dict[str, List[Tuple[str, Parameter]]] = {}
        for name, p in self.named_parameters():
            parts = name.split(".")
            key = ".".join(parts[:3]) if parts[1] in ("encoder_layers", "decoder_layers") else ".".join(parts[:2])
            groups.setdefault(key, []).append((name, p))
        return groups

    # ---- forward pipeline ----
    def condition(self, ids: np.ndarray, mask: np.ndarray) -> Conditioning:
        """beta -> P, encoder states h, topic attention, pooled s"""
        encoded = self.seq2seq.encode(ids, mask)
        attention = None
        if POOLERS[self.config.pooling_mode].needs_topic_attention:
            attention = self.topic_attention(self.ntm.beta(), encoded.h, encoded.pad_mask)
        s = pool(encoded, self.config.pooling_mode, attention)
        return Conditioning(encoded=encoded, s=s, attention=attention)

    def forward(self, batch: Batch, ntm_noise: Optional[np.ndarray] = None) -> LossBreakdown:
        return self.loss(batch, ntm_noise=ntm_noise)

    def summarization_loss(self, batch: Batch) -> Tensor:
        """Teacher-forced token cross-entropy averaged over real target tokens"""
        conditioning = self.condition(batch.ids, batch.mask)
        logits = self.seq2seq.decode(batch.decoder_input, conditioning.encoded, conditioning.s)
        return F.cross_entropy(logits, batch.targets, batch.target_mask)

    def loss(self, batch: Batch, ntm_noise: Optional[np.ndarray] = None) -> LossBreakdown:
        """
        Both objectives for one batch

        Args:
            batch: aligned BoW, encoder and teacher-forcing views
            ntm_noise: fixed reparameterization draw (B, latent_dim)
        """
        lam = self.config.lambda_
        l_ntm = self.ntm.loss(batch.bow, sample=self.training, noise=ntm_noise)
        l_sum = self.summarization_loss(batch)
        if lam == 0.0:
            objective = l_sum
        elif lam == 1.0:
            objective = l_ntm
        else:
            objective = l_ntm * lam + l_sum * (1.0 - lam)
        return LossBreakdown(
            l_ntm=l_ntm.item(),
            l_sum=l_sum.item(),
            combined=combine_losses(l_ntm.item(), l_sum.item(), lam),
            lambda_=lam,
            objective=objective,
        )

    # ---- inference helpers ----
    def scorer(self, ids: np.ndarray, mask: np.ndarray) -> "DocumentScorer":
        """Frozen next-token scorer for a single document (ids of shape (1, N))"""
        with no_grad():
            conditioning = self.condition(ids, mask)
        return DocumentScorer(self.seq2seq, conditioning)

    def attention_profiles(self, ids: np.ndarray, mask: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Topic attention alpha_hat and last-layer self-attention profile, each (B, N)"""
        with no_grad():
            encoded = self.seq2seq.encode(ids, mask)
            weights = self.topic_attention(self.ntm.beta(), encoded.h, encoded.pad_mask)
        return weights.alpha_hat.data, self.seq2seq.self_attention_profile()


class DocumentScorer:
    """Next-token log-probabilities for a batch of equal-length prefixes of one document"""

    def __init__(self, seq2seq: Seq2SeqTransformer, conditioning: Conditioning):
        self.seq2seq = seq2seq
        self.conditioning = conditioning

    def next_log_probs(self, prefixes: np.ndarray) -> np.ndarray:
        prefixes = np.atleast_2d(np.asarray(prefixes, dtype=np.int64))
        n = prefixes.shape[0]
        base = self.conditioning
        encoded = EncoderOutput(
            h=Tensor(np.repeat(base.encoded.h.data, n, axis=0)),
            pad_mask=np.repeat(base.encoded.pad_mask, n, axis=0),
        )
        s = Tensor(np.repeat(base.s.data, n, axis=0))
        with no_grad():
            logits = self.seq2seq.decode_step(prefixes, encoded, s)
            return F.log_softmax(logits, axis=-1).data
