"""
Float64 tensor with a reverse-mode tape
Every differentiable op records its parents and a closure that pushes the
upstream gradient back to them; backward() replays the tape in reverse
topological order.
"""

from contextlib import contextmanager
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from utils.errors import ContractError

DTYPE = np.float64

_grad_enabled = True


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable tape recording (inference, validation, finite differences)"""
    global _grad_enabled
    previous = _grad_enabled
    _grad_enabled = False
    try:
        yield
    finally:
        _grad_enabled = previous


def is_grad_enabled() -> bool:
    return _grad_enabled


class Tensor:
    """Dense float64 array plus the bookkeeping needed for backward()"""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "name")
    __array_ufunc__ = None  # ndarray (op) Tensor defers to the Tensor operator

    def __init__(
        self,
        data,
        requires_grad: bool = False,
        parents: Sequence["Tensor"] = (),
        backward: Optional[Callable[[np.ndarray], None]] = None,
        name: str = "",
    ):
        self.data = np.asarray(data, dtype=DTYPE)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents: Tuple["Tensor", ...] = tuple(parents)
        self._backward = backward
        self.name = name

    # ---- shape helpers ----
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() needs a single element, got shape {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data.copy())

    def __repr__(self) -> str:
        label = f" '{self.name}'" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, requires_grad={self.requires_grad})"

    def _accumulate(self, grad: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += grad

    # ---- operators delegate to numeric.functional ----
    def __add__(self, other):
        from numeric import functional as F
        return F.add(self, other)

    def __radd__(self, other):
        from numeric import functional as F
        return F.add(other, self)

    def __sub__(self, other):
        from numeric import functional as F
        return F.sub(self, other)

    def __rsub__(self, other):
        from numeric import functional as F
        return F.sub(other, self)

    def __mul__(self, other):
        from numeric import functional as F
        return F.mul(self, other)

    def __rmul__(self, other):
        from numeric import functional as F
        return F.mul(other, self)

    def __truediv__(self, other):
        from numeric import functional as F
        return F.div(self, other)

    def __rtruediv__(self, other):
        from numeric import functional as F
        return F.div(other, self)

    def __neg__(self):
        from numeric import functional as F
        return F.neg(self)

    def __matmul__(self, other):
        from numeric import functional as F
        return F.matmul(self, other)

    def __getitem__(self, index):
        from numeric import functional as F
        return F.index(self, index)

    def sum(self, axis=None, keepdims: bool = False):
        from numeric import functional as F
        return F.sum(self, axis=axis, keepdims=keepdims)

    def mean(self, axis=None, keepdims: bool = False):
        from numeric import functional as F
        return F.mean(self, axis=axis, keepdims=keepdims)

    def reshape(self, *shape):
        from numeric import functional as F
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return F.reshape(self, shape)

    def swapaxes(self, a: int, b: int):
        from numeric import functional as F
        return F.swapaxes(self, a, b)

    @property
    def T(self):
        return self.swapaxes(-1, -2)

    def backward(self) -> None:
        backward(self)


def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def make_result(
    data: np.ndarray,
    parents: Sequence[Tensor],
    backward_fn: Callable[[np.ndarray], None],
) -> Tensor:
    """Wrap an op output, recording it on the tape only when a parent needs grad"""
    needs_grad = _grad_enabled and any(p.requires_grad for p in parents)
    if not needs_grad:
        return Tensor(data)
    return Tensor(data, requires_grad=True, parents=parents, backward=backward_fn)


def _topological_order(root: Tensor) -> List[Tensor]:
    order: List[Tensor] = []
    visited = set()
    stack: List[Tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def backward(loss: Tensor) -> None:
    """
    Accumulate d(loss)/d(leaf) into the .grad of every reachable leaf

    Args:
        loss: single-element tensor produced by differentiable ops

    Raises:
        ContractError: loss is not a scalar
    """
    if loss.size != 1:
        raise ContractError(f"backward() needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        return

    order = _topological_order(loss)
    loss.grad = np.ones_like(loss.data)
    for node in reversed(order):
        if node._backward is None or node.grad is None:
            continue
        node._backward(node.grad)
        # interior nodes are not needed after their gradient has been pushed
        if node._parents:
            node.grad = None
            node._backward = None
            node._parents = ()
