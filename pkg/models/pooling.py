"""
Sequence pooling strategies that turn encoder states into the decoder's s vector
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from numeric import functional as F
from numeric.tensor import Tensor
from models.topic_attention import TopicAttentionWeights, pool_sequence
from utils.errors import ContractError


@dataclass
class EncoderOutput:
    h: Tensor               # (B, N, H) last encoder layer
    pad_mask: np.ndarray    # (B, N) True on real tokens


class BasePooler(ABC):
    """
    Abstract base class for all pooling modes
    Enforces a consistent interface for the model's pooling step
    """

    mode: str = ""
    needs_topic_attention: bool = False

    @abstractmethod
    def pool(self, encoder_output: EncoderOutput,
             topic_attention: Optional[TopicAttentionWeights] = None) -> Tensor:
        """
        Collapse (B, N, H) hidden states to (B, H)

        Args:
            encoder_output: hidden states and padding mask
            topic_attention: normalized topic attention, for modes that use it
        """
        pass


class TopicPooler(BasePooler):
    """s = alpha_hat^T h"""
    mode = "topic"
    needs_topic_attention = True

    def pool(self, encoder_output, topic_attention=None):
        if topic_attention is None:
            raise ContractError("topic pooling needs TopicAttentionWeights")
        return pool_sequence(topic_attention.alpha_hat, encoder_output.h)


class ClsPooler(BasePooler):
    """s = hidden state of the leading CLS token"""
    mode = "cls"

    def pool(self, encoder_output, topic_attention=None):
        return encoder_output.h[..., 0, :]


class SumPooler(BasePooler):
    """s = unnormalized sum of the real-token hidden states"""
    mode = "sum"

    def pool(self, encoder_output, topic_attention=None):
        mask = encoder_output.pad_mask[..., None].astype(np.float64)
        return F.sum(encoder_output.h * mask, axis=-2)


POOLERS: Dict[str, BasePooler] = {
    "topic": TopicPooler(),
    "cls": ClsPooler(),
    "sum": SumPooler(),
}


def pool(encoder_output: EncoderOutput, mode: str,
         topic_attention: Optional[TopicAttentionWeights] = None) -> Tensor:
    """Dispatch to the pooling strategy registered for `mode`"""
    try:
        pooler = POOLERS[mode]
    except KeyError:
        raise ContractError(f"unknown pooling mode '{mode}'")
    return pooler.pool(encoder_output, topic_attention)
