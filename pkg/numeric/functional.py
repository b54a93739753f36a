"""
Differentiable tensor operations
Each op computes its forward value with numpy and registers a backward closure.
Broadcasting follows numpy; gradients are summed back to the operand shape.
"""

from typing import Optional, Sequence, Tuple, Union

import numpy as np

from numeric.tensor import DTYPE, Tensor, as_tensor, make_result
from utils.errors import DimensionError

Axis = Union[None, int, Tuple[int, ...]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to `shape`"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def _push(t: Tensor, grad: np.ndarray) -> None:
    if t.requires_grad:
        t._accumulate(_unbroadcast(grad, t.shape))


# ==================== ELEMENTWISE ARITHMETIC ====================
def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, grad)
        _push(b, grad)

    return make_result(a.data + b.data, (a, b), backward)


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, grad)
        _push(b, -grad)

    return make_result(a.data - b.data, (a, b), backward)


def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)

    def backward(grad):
        _push(a, grad * b.data)
        _push(b, grad * a.data)

    return make_result(a.data * b.data, (a, b), backward)


def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    out = a.data / b.data

    def backward(grad):
        _push(a, grad / b.data)
        _push(b, -grad * out / b.data)

    return make_result(out, (a, b), backward)


def neg(a) -> Tensor:
    a = as_tensor(a)
    return make_result(-a.data, (a,), lambda grad: _push(a, -grad))


def square(a) -> Tensor:
    a = as_tensor(a)
    return make_result(a.data * a.data, (a,), lambda grad: _push(a, 2.0 * a.data * grad))


def exp(a) -> Tensor:
    a = as_tensor(a)
    out = np.exp(a.data)
    return make_result(out, (a,), lambda grad: _push(a, grad * out))


def log(a) -> Tensor:
    a = as_tensor(a)
    return make_result(np.log(a.data), (a,), lambda grad: _push(a, grad / a.data))


def sqrt(a) -> Tensor:
    a = as_tensor(a)
    out = np.sqrt(a.data)
    return make_result(out, (a,), lambda grad: _push(a, grad * 0.5 / out))


# ==================== NONLINEARITIES ====================
def relu(a) -> Tensor:
    a = as_tensor(a)
    active = a.data > 0
    return make_result(np.where(active, a.data, 0.0), (a,), lambda grad: _push(a, grad * active))


def softplus(a) -> Tensor:
    a = as_tensor(a)
    out = np.logaddexp(0.0, a.data)

    def backward(grad):
        sigmoid = np.exp(-np.logaddexp(0.0, -a.data))
        _push(a, grad * sigmoid)

    return make_result(out, (a,), backward)


_GELU_C = np.sqrt(2.0 / np.pi)


def gelu(a) -> Tensor:
    """tanh approximation"""
    a = as_tensor(a)
    x = a.data
    inner = _GELU_C * (x + 0.044715 * x ** 3)
    t = np.tanh(inner)
    out = 0.5 * x * (1.0 + t)

    def backward(grad):
        d_inner = _GELU_C * (1.0 + 3 * 0.044715 * x ** 2)
        local = 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * d_inner
        _push(a, grad * local)

    return make_result(out, (a,), backward)


# ==================== REDUCTIONS ====================
def sum(a, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    a = as_tensor(a)
    out = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(grad):
        if axis is not None and not keepdims:
            grad = np.expand_dims(grad, axis)
        _push(a, np.broadcast_to(grad, a.shape))

    return make_result(out, (a,), backward)


def mean(a, axis: Axis = None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.data.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])
    return div(sum(a, axis=axis, keepdims=keepdims), float(count))


# ==================== SHAPE & INDEXING ====================
def reshape(a, shape: Sequence[int]) -> Tensor:
    a = as_tensor(a)
    original = a.shape
    return make_result(a.data.reshape(shape), (a,), lambda grad: _push(a, grad.reshape(original)))


def swapaxes(a, axis1: int, axis2: int) -> Tensor:
    a = as_tensor(a)
    return make_result(
        np.swapaxes(a.data, axis1, axis2), (a,), lambda grad: _push(a, np.swapaxes(grad, axis1, axis2))
    )


def index(a, key) -> Tensor:
    """Basic or advanced indexing; repeated indices accumulate"""
    a = as_tensor(a)
    parts = key if isinstance(key, tuple) else (key,)
    basic = all(p is Ellipsis or p is None or isinstance(p, (int, np.integer, slice)) for p in parts)

    def backward(grad):
        full = np.zeros_like(a.data)
        if basic:
            full[key] += grad
        else:
            np.add.at(full, key, grad)
        _push(a, full)

    return make_result(a.data[key], (a,), backward)


def embedding(weight: Tensor, ids: np.ndarray) -> Tensor:
    """Row lookup weight[ids]; output shape ids.shape + (cols,)"""
    ids = np.asarray(ids, dtype=np.int64)

    def backward(grad):
        full = np.zeros_like(weight.data)
        np.add.at(full, ids.reshape(-1), grad.reshape(-1, weight.shape[-1]))
        _push(weight, full)

    return make_result(weight.data[ids], (weight,), backward)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    sizes = [t.shape[axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(grad):
        for t, piece in zip(tensors, np.split(grad, splits, axis=axis)):
            _push(t, piece)

    return make_result(np.concatenate([t.data for t in tensors], axis=axis), tensors, backward)


def masked_fill(a, mask: np.ndarray, value: float) -> Tensor:
    """Replace entries where mask is True by a constant; no gradient flows there"""
    a = as_tensor(a)
    mask = np.broadcast_to(np.asarray(mask, dtype=bool), a.shape)
    return make_result(np.where(mask, value, a.data), (a,), lambda grad: _push(a, np.where(mask, 0.0, grad)))


# ==================== LINEAR ALGEBRA ====================
def matmul(a, b) -> Tensor:
    """
    Matrix product with numpy batching rules

    Raises:
        DimensionError: inner dimensions differ
    """
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape)

    def backward(grad):
        if a.requires_grad:
            _push(a, grad @ np.swapaxes(b.data, -1, -2))
        if b.requires_grad:
            _push(b, np.swapaxes(a.data, -1, -2) @ grad)

    return make_result(a.data @ b.data, (a, b), backward)


# ==================== NORMALIZATION ====================
def softmax(a, axis: int = -1) -> Tensor:
    """Max-shifted softmax; -inf entries get probability 0"""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(grad):
        _push(a, out * (grad - (grad * out).sum(axis=axis, keepdims=True)))

    return make_result(out, (a,), backward)


def log_softmax(a, axis: int = -1) -> Tensor:
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=axis, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=axis, keepdims=True))
    out = shifted - log_norm

    def backward(grad):
        probs = np.exp(out)
        _push(a, grad - probs * grad.sum(axis=axis, keepdims=True))

    return make_result(out, (a,), backward)


def layer_norm(a, gain, bias, eps: float = 1e-5) -> Tensor:
    """
    Normalize each row over the last axis, then scale and shift

    Raises:
        DimensionError: gain/bias width differs from the row width
    """
    a, gain, bias = as_tensor(a), as_tensor(gain), as_tensor(bias)
    width = a.shape[-1]
    if gain.shape[-1] != width or bias.shape[-1] != width:
        raise DimensionError("layer_norm", a.shape, gain.shape, bias.shape)

    mu = a.data.mean(axis=-1, keepdims=True)
    centered = a.data - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    normalized = centered * inv_std
    out = normalized * gain.data + bias.data

    def backward(grad):
        _push(bias, grad)
        _push(gain, grad * normalized)
        if a.requires_grad:
            g = grad * gain.data
            d_a = inv_std * (
                g - g.mean(axis=-1, keepdims=True)
                - normalized * (g * normalized).mean(axis=-1, keepdims=True)
            )
            _push(a, d_a)

    return make_result(out, (a, gain, bias), backward)


# ==================== STOCHASTIC ====================
def dropout(a, rate: float, rng: np.random.Generator, training: bool) -> Tensor:
    """Inverted dropout: kept units are scaled by 1/(1-rate) so eval needs no rescale"""
    a = as_tensor(a)
    if not training or rate <= 0.0:
        return a
    keep = (rng.random(a.shape) >= rate).astype(DTYPE) / (1.0 - rate)
    return make_result(a.data * keep, (a,), lambda grad: _push(a, grad * keep))


# ==================== LOSSES ====================
def cross_entropy(logits: Tensor, targets: np.ndarray, mask: Optional[np.ndarray] = None) -> Tensor:
    """Token-level cross-entropy averaged over positions where mask is 1"""
    targets = np.asarray(targets, dtype=np.int64)
    log_probs = log_softmax(logits, axis=-1)
    flat = reshape(log_probs, (-1, logits.shape[-1]))
    picked = index(flat, (np.arange(targets.size), targets.reshape(-1)))
    weights = np.ones(targets.size) if mask is None else np.asarray(mask, dtype=DTYPE).reshape(-1)
    total = weights.sum()
    return neg(sum(mul(picked, weights)) / max(total, 1.0))
