"""
Numeric core: float64 tensors, reverse-mode gradients, layers and Adam
"""
from .tensor import Tensor, backward, no_grad
from .functional import matmul, softmax, layer_norm
from .optim import Parameter, AdamConfig, Adam, adam_step
from .module import Module

softmax_rows = softmax

__all__ = [
    'Tensor', 'backward', 'no_grad',
    'matmul', 'softmax', 'softmax_rows', 'layer_norm',
    'Parameter', 'AdamConfig', 'Adam', 'adam_step', 'Module',
]
