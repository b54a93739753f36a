"""
Base class that every network component inherits from
Ensures a consistent interface for parameter discovery, train/eval mode and gradients
"""

from abc import ABC, abstractmethod
from typing import Dict, Iterator, List, Tuple

import numpy as np

from numeric.optim import Parameter


class Module(ABC):
    """
    Abstract base class for layers and models
    Parameters and sub-modules are discovered from instance attributes
    (including lists of modules) in attribute definition order.
    """

    def __init__(self):
        self.training = True

    @abstractmethod
    def forward(self, *args, **kwargs):
        """
        Main computation - must be implemented by all subclasses
        """
        pass

    def __call__(self, *args, **kwargs):
        return self.forward(*args, **kwargs)

    # ---- parameter discovery ----
    def _children(self) -> Iterator[Tuple[str, object]]:
        for name, value in vars(self).items():
            if isinstance(value, (Parameter, Module)):
                yield name, value
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, (Parameter, Module)):
                        yield f"{name}.{i}", item

    def named_parameters(self, prefix: str = "") -> Iterator[Tuple[str, Parameter]]:
        seen = set()
        for name, child in self._children():
            full = f"{prefix}{name}"
            if isinstance(child, Parameter):
                if id(child) not in seen:
                    seen.add(id(child))
                    yield full, child
            else:
                for sub_name, p in child.named_parameters(prefix=f"{full}."):
                    if id(p) not in seen:
                        seen.add(id(p))
                        yield sub_name, p

    def parameters(self) -> List[Parameter]:
        return [p for _, p in self.named_parameters()]

    def modules(self) -> Iterator["Module"]:
        yield self
        for _, child in self._children():
            if isinstance(child, Module):
                yield from child.modules()

    def parameter_count(self) -> int:
        return int(sum(p.size for p in self.parameters()))

    # ---- mode & gradients ----
    def train(self, mode: bool = True) -> "Module":
        for m in self.modules():
            m.training = mode
        return self

    def eval(self) -> "Module":
        return self.train(False)

    def zero_grad(self) -> None:
        for p in self.parameters():
            p.zero_grad()

    # ---- state ----
    def state_dict(self) -> Dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: p.shape for name, p in self.named_parameters()}
