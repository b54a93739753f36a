"""
Reusable layers built on numeric.functional
"""

from typing import Optional

import numpy as np

from config import LAYER_NORM_EPS
from numeric import functional as F
from numeric.module import Module
from numeric.optim import Parameter
from numeric.tensor import Tensor


def glorot_uniform(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Uniform in ±sqrt(6 / (fan_in + fan_out))"""
    limit = np.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


class Linear(Module):
    """y = x W + b with W of shape (in, out)"""

    def __init__(self, in_features: int, out_features: int, rng: np.random.Generator,
                 bias: bool = True, name: str = "linear"):
        super().__init__()
        self.weight = Parameter(glorot_uniform(rng, in_features, out_features), name=f"{name}.weight")
        self.bias: Optional[Parameter] = (
            Parameter(np.zeros((1, out_features)), name=f"{name}.bias") if bias else None
        )

    def forward(self, x: Tensor) -> Tensor:
        out = F.matmul(x, self.weight)
        return out + self.bias if self.bias is not None else out


class Embedding(Module):
    """Token id -> learned row"""

    def __init__(self, num_embeddings: int, dim: int, rng: np.random.Generator, name: str = "embedding"):
        super().__init__()
        self.weight = Parameter(glorot_uniform(rng, num_embeddings, dim), name=f"{name}.weight")

    def forward(self, ids: np.ndarray) -> Tensor:
        return F.embedding(self.weight, ids)


class LayerNorm(Module):
    def __init__(self, dim: int, eps: float = LAYER_NORM_EPS, name: str = "layer_norm"):
        super().__init__()
        self.gain = Parameter(np.ones((1, dim)), name=f"{name}.gain")
        self.bias = Parameter(np.zeros((1, dim)), name=f"{name}.bias")
        self.eps = eps

    def forward(self, x: Tensor) -> Tensor:
        return F.layer_norm(x, self.gain, self.bias, self.eps)


class Dropout(Module):
    """Inverted dropout drawing from the model's shared generator"""

    def __init__(self, rate: float, rng: np.random.Generator):
        super().__init__()
        self.rate = rate
        self.rng = rng

    def forward(self, x: Tensor) -> Tensor:
        return F.dropout(x, self.rate, self.rng, self.training)


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Fixed sine/cosine position table of shape (length, dim)"""
    position = np.arange(length)[:, None]
    div_term = np.exp(np.arange(0, dim, 2) / dim * np.log(1.0 / 10000.0))
    table = np.zeros((length, dim))
    table[:, 0::2] = np.sin(position * div_term)
    table[:, 1::2] = np.cos(position * div_term[: dim // 2])
    return table
