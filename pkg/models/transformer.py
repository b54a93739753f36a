"""
Compact pre-norm transformer encoder-decoder
Token embeddings are shared by encoder and decoder inputs; the output
projection is separate. The decoder sees the pooled vector s either as an
extra always-visible memory slot or added to its input embeddings.
"""

import math
from typing import List, Optional

import numpy as np

from models.config import ModelConfig
from models.pooling import EncoderOutput
from numeric import functional as F
from numeric.layers import Dropout, Embedding, LayerNorm, Linear, sinusoidal_positions
from numeric.module import Module
from numeric.tensor import Tensor
from utils.errors import ContractError, SequenceTooLongError


class MultiHeadAttention(Module):
    """Scaled dot-product attention over `heads` slices of width H/heads"""

    def __init__(self, hidden: int, heads: int, rng: np.random.Generator, name: str = "attention"):
        super().__init__()
        self.heads = heads
        self.head_width = hidden // heads
        self.query = Linear(hidden, hidden, rng, name=f"{name}.query")
        self.key = Linear(hidden, hidden, rng, name=f"{name}.key")
        self.value = Linear(hidden, hidden, rng, name=f"{name}.value")
        self.output = Linear(hidden, hidden, rng, name=f"{name}.output")
        self.last_weights: Optional[np.ndarray] = None

    def _split(self, x: Tensor) -> Tensor:
        batch, length, _ = x.shape
        return F.swapaxes(F.reshape(x, (batch, length, self.heads, self.head_width)), 1, 2)

    def forward(self, query_states: Tensor, key_states: Tensor, allowed: np.ndarray) -> Tensor:
        """
        Args:
            query_states: (B, Tq, H)
            key_states: (B, Tk, H)
            allowed: boolean, broadcastable to (B, heads, Tq, Tk); False keys get weight 0
        """
        q = self._split(self.query(query_states))
        k = self._split(self.key(key_states))
        v = self._split(self.value(key_states))
        scores = F.matmul(q, F.swapaxes(k, -1, -2)) / math.sqrt(self.head_width)
        weights = F.softmax(F.masked_fill(scores, ~allowed, -np.inf), axis=-1)
        self.last_weights = weights.data
        context = F.matmul(weights, v)
        batch, _, length, _ = context.shape
        merged = F.reshape(F.swapaxes(context, 1, 2), (batch, length, self.heads * self.head_width))
        return self.output(merged)


class FeedForward(Module):
    def __init__(self, hidden: int, width: int, rng: np.random.Generator, name: str = "ffn"):
        super().__init__()
        self.inner = Linear(hidden, width, rng, name=f"{name}.inner")
        self.outer = Linear(width, hidden, rng, name=f"{name}.outer")

    def forward(self, x: Tensor) -> Tensor:
        return self.outer(F.gelu(self.inner(x)))


class EncoderLayer(Module):
    def __init__(self, config: ModelConfig, rng: np.random.Generator, name: str):
        super().__init__()
        self.self_attention = MultiHeadAttention(config.hidden, config.heads, rng, f"{name}.self_attention")
        self.feed_forward = FeedForward(config.hidden, config.ffn_width, rng, f"{name}.ffn")
        self.norm_attention = LayerNorm(config.hidden, name=f"{name}.norm_attention")
        self.norm_ffn = LayerNorm(config.hidden, name=f"{name}.norm_ffn")
        self.dropout = Dropout(config.dropout, rng)

    def forward(self, x: Tensor, allowed: np.ndarray) -> Tensor:
        normed = self.norm_attention(x)
        x = x + self.dropout(self.self_attention(normed, normed, allowed))
        return x + self.dropout(self.feed_forward(self.norm_ffn(x)))


class DecoderLayer(Module):
    def __init__(self, config: ModelConfig, rng: np.random.Generator, name: str):
        super().__init__()
        self.self_attention = MultiHeadAttention(config.hidden, config.heads, rng, f"{name}.self_attention")
        self.cross_attention = MultiHeadAttention(config.hidden, config.heads, rng, f"{name}.cross_attention")
        self.feed_forward = FeedForward(config.hidden, config.ffn_width, rng, f"{name}.ffn")
        self.norm_self = LayerNorm(config.hidden, name=f"{name}.norm_self")
        self.norm_cross = LayerNorm(config.hidden, name=f"{name}.norm_cross")
        self.norm_ffn = LayerNorm(config.hidden, name=f"{name}.norm_ffn")
        self.dropout = Dropout(config.dropout, rng)

    def forward(self, x: Tensor, memory: Tensor, causal: np.ndarray, memory_allowed: np.ndarray) -> Tensor:
        normed = self.norm_self(x)
        x = x + self.dropout(self.self_attention(normed, normed, causal))
        x = x + self.dropout(self.cross_attention(self.norm_cross(x), memory, memory_allowed))
        return x + self.dropout(self.feed_forward(self.norm_ffn(x)))


class Seq2SeqTransformer(Module):
    """Encoder stack, decoder stack and vocabulary projection"""

    def __init__(self, config: ModelConfig, rng: np.random.Generator):
        super().__init__()
        self.config = config
        self.embedding = Embedding(config.vocab_size, config.hidden, rng, name="embedding")
        self.encoder_layers: List[EncoderLayer] = [
            EncoderLayer(config, rng, f"encoder.{i}") for i in range(config.encoder_layers)
        ]
        self.encoder_norm = LayerNorm(config.hidden, name="encoder.norm")
        self.decoder_layers: List[DecoderLayer] = [
            DecoderLayer(config, rng, f"decoder.{i}") for i in range(config.decoder_layers)
        ]
        self.decoder_norm = LayerNorm(config.hidden, name="decoder.norm")
        self.output = Linear(config.hidden, config.vocab_size, rng, name="output")
        self.dropout = Dropout(config.dropout, rng)
        self.positions = sinusoidal_positions(max(config.max_len, config.max_summary_len) + 1, config.hidden)
        self._last_mask: Optional[np.ndarray] = None

    def forward(self, ids: np.ndarray, mask: np.ndarray, decoder_input: np.ndarray,
                s: Optional[Tensor] = None) -> Tensor:
        return self.decode(decoder_input, self.encode(ids, mask), s)

    def encoder_parameters(self):
        """Token embeddings plus every encoder-side parameter (the freeze_encoder set)"""
        params = list(self.embedding.parameters())
        for layer in self.encoder_layers:
            params.extend(layer.parameters())
        params.extend(self.encoder_norm.parameters())
        return params

    def embed(self, ids: np.ndarray) -> Tensor:
        length = ids.shape[-1]
        x = self.embedding(ids) * math.sqrt(self.config.hidden)
        if self.config.position_encoding:
            x = x + self.positions[:length]
        return self.dropout(x)

    def encode(self, ids: np.ndarray, mask: np.ndarray) -> EncoderOutput:
        """
        Encoder stack over (B, N) ids; PAD keys are masked out of self-attention

        Raises:
            SequenceTooLongError: N > max_len
        """
        ids = np.asarray(ids, dtype=np.int64)
        mask = np.asarray(mask, dtype=bool)
        if ids.shape[-1] > self.config.max_len:
            raise SequenceTooLongError(ids.shape[-1], self.config.max_len)
        self._last_mask = mask
        allowed = mask[:, None, None, :]
        x = self.embed(ids)
        for layer in self.encoder_layers:
            x = layer(x, allowed)
        return EncoderOutput(h=self.encoder_norm(x), pad_mask=mask)

    def decode(self, decoder_input: np.ndarray, encoded: EncoderOutput, s: Optional[Tensor]) -> Tensor:
        """
        Teacher-forced decoder pass; logits of shape (B, T, vocab)

        Args:
            decoder_input: (B, T) BOS-prefixed ids
            encoded: encoder states and mask
            s: pooled representation (B, H)
        """
        decoder_input = np.asarray(decoder_input, dtype=np.int64)
        batch, length = decoder_input.shape
        if length == 0:
            raise ContractError("decoder prefix is empty; it must start with BOS")
        if length > self.config.max_summary_len + 1:
            raise SequenceTooLongError(length, self.config.max_summary_len + 1)

        x = self.embed(decoder_input)
        memory, memory_mask = encoded.h, encoded.pad_mask
        if s is not None:
            s_row = F.reshape(s, (batch, 1, self.config.hidden))
            if self.config.injection == "embedding":
                x = x + s_row
            else:
                memory = F.concat([memory, s_row], axis=1)
                memory_mask = np.concatenate([memory_mask, np.ones((batch, 1), dtype=bool)], axis=1)

        causal = np.tril(np.ones((length, length), dtype=bool))[None, None, :, :]
        memory_allowed = memory_mask[:, None, None, :]
        for layer in self.decoder_layers:
            x = layer(x, memory, causal, memory_allowed)
        return self.output(self.decoder_norm(x))

    def decode_step(self, prefix: np.ndarray, encoded: EncoderOutput, s: Optional[Tensor]) -> Tensor:
        """Next-token logits (B, vocab) for BOS-prefixed prefixes"""
        prefix = np.atleast_2d(np.asarray(prefix, dtype=np.int64))
        if prefix.shape[-1] == 0:
            raise ContractError("decoder prefix is empty; it must start with BOS")
        logits = self.decode(prefix, encoded, s)
        return logits[:, -1, :]

    def self_attention_profile(self) -> Optional[np.ndarray]:
        """
        Attention mass each token receives in the last encoder layer, averaged
        over heads and real query positions, renormalized over real tokens; (B, N)
        """
        if not self.encoder_layers or self.encoder_layers[-1].self_attention.last_weights is None:
            return None
        weights = self.encoder_layers[-1].self_attention.last_weights   # (B, heads, N, N)
        return received_attention(weights.mean(axis=1), self._last_mask)


def received_attention(weights: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Column mass of (B, N, N) attention over real query rows, normalized over real keys"""
    mask = np.asarray(mask, dtype=bool)
    rows = mask[:, :, None].astype(np.float64)
    received = (weights * rows).sum(axis=1) * mask
    totals = received.sum(axis=-1, keepdims=True)
    return np.divide(received, totals, out=np.zeros_like(received), where=totals > 0)
