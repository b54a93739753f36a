"""
Topic-aware attention
beta (K x V_topics) is projected to topic embeddings P (K x H), encoder states
are scored against every topic, scores are averaged over topics and
normalized over the real tokens of each sequence.
"""

from dataclasses import dataclass

import numpy as np

from numeric import functional as F
from numeric.layers import LayerNorm, Linear
from numeric.module import Module
from numeric.tensor import Tensor, as_tensor
from utils.errors import DimensionError, EmptySequenceError


@dataclass
class TopicAttentionWeights:
    raw: Tensor          # (B, K, N) topic-major scores a
    alpha: Tensor        # (B, N) mean over topics
    alpha_hat: Tensor    # (B, N) softmax over non-PAD tokens, 0 on PAD


class TopicProjection(Module):
    """FFN (V_topics -> H -> H, ReLU inside) followed by the softmax/LayerNorm residual"""

    def __init__(self, topic_vocab_size: int, hidden: int, rng: np.random.Generator, variant: str = "residual_ln"):
        super().__init__()
        self.topic_vocab_size = topic_vocab_size
        self.variant = variant
        self.ffn_in = Linear(topic_vocab_size, hidden, rng, name="projection.ffn_in")
        self.ffn_out = Linear(hidden, hidden, rng, name="projection.ffn_out")
        self.norm = LayerNorm(hidden, name="projection.norm")

    def ffn(self, beta: Tensor) -> Tensor:
        return self.ffn_out(F.relu(self.ffn_in(beta)))

    def forward(self, beta) -> Tensor:
        return project_topics(beta, self)


def project_topics(beta, projection: TopicProjection) -> Tensor:
    """
    P = FFN(beta) + LayerNorm(softmax(FFN(beta)))   (variant "residual_ln")
    P = LayerNorm(FFN(beta) + softmax(FFN(beta)))   (variant "post_ln")

    Raises:
        DimensionError: beta width differs from the topic vocabulary size
    """
    beta = as_tensor(beta)
    if beta.shape[-1] != projection.topic_vocab_size:
        raise DimensionError("project_topics", beta.shape, (beta.shape[0], projection.topic_vocab_size))
    hidden = projection.ffn(beta)
    if projection.variant == "post_ln":
        return projection.norm(hidden + F.softmax(hidden, axis=-1))
    return hidden + projection.norm(F.softmax(hidden, axis=-1))


def score(h, p) -> Tensor:
    """
    a[t, i] = <P_t, h_i>, topic-major: (..., K, N)

    Raises:
        DimensionError: h and P widths differ
    """
    h, p = as_tensor(h), as_tensor(p)
    if h.shape[-1] != p.shape[-1]:
        raise DimensionError("score", h.shape, p.shape)
    return F.matmul(p, F.swapaxes(h, -1, -2))


def pool_and_normalize(a, pad_mask: np.ndarray) -> TopicAttentionWeights:
    """
    Average scores over topics, then softmax over real tokens

    Args:
        a: (..., K, N) raw scores
        pad_mask: (..., N) True on real tokens

    Raises:
        EmptySequenceError: a sequence has no real tokens
    """
    a = as_tensor(a)
    pad_mask = np.asarray(pad_mask, dtype=bool)
    if not pad_mask.any(axis=-1).all():
        raise EmptySequenceError("topic attention over a sequence with every position masked")
    alpha = F.mean(a, axis=-2)
    alpha_hat = F.softmax(F.masked_fill(alpha, ~pad_mask, -np.inf), axis=-1)
    return TopicAttentionWeights(raw=a, alpha=alpha, alpha_hat=alpha_hat)


def pool_sequence(alpha_hat, h) -> Tensor:
    """s = alpha_hat^T h, a convex combination of the rows of h; shape (..., H)"""
    alpha_hat, h = as_tensor(alpha_hat), as_tensor(h)
    weighted = F.matmul(F.reshape(alpha_hat, alpha_hat.shape[:-1] + (1, alpha_hat.shape[-1])), h)
    return F.reshape(weighted, weighted.shape[:-2] + (h.shape[-1],))


class TopicAttention(Module):
    """Projection plus the scoring/normalization pipeline"""

    def __init__(self, topic_vocab_size: int, hidden: int, rng: np.random.Generator, variant: str = "residual_ln"):
        super().__init__()
        self.projection = TopicProjection(topic_vocab_size, hidden, rng, variant)

    def forward(self, beta, h, pad_mask: np.ndarray) -> TopicAttentionWeights:
        p = self.projection(beta)
        return pool_and_normalize(score(h, p), pad_mask)
