"""
Trainable parameters and the Adam optimizer
"""

from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List

import numpy as np

from config import ADAM_DEFAULTS
from numeric.tensor import DTYPE, Tensor
from utils.errors import ConfigValidationError


class Parameter(Tensor):
    """Leaf tensor that owns its gradient and Adam moment buffers"""

    __slots__ = ("adam_m", "adam_v", "step_count")

    def __init__(self, data, name: str = ""):
        data = np.asarray(data, dtype=DTYPE)
        if data.ndim == 1:
            data = data.reshape(1, -1)
        super().__init__(data, requires_grad=True, name=name)
        self.grad = np.zeros_like(self.data)
        self.adam_m = np.zeros_like(self.data)
        self.adam_v = np.zeros_like(self.data)
        self.step_count = 0

    def zero_grad(self) -> None:
        self.grad = np.zeros_like(self.data)

    def __repr__(self) -> str:
        return f"Parameter '{self.name}' {self.shape} steps={self.step_count}"


@dataclass
class AdamConfig:
    """Adam hyperparameters"""
    learning_rate: float = ADAM_DEFAULTS["learning_rate"]
    beta1: float = ADAM_DEFAULTS["beta1"]
    beta2: float = ADAM_DEFAULTS["beta2"]
    epsilon: float = ADAM_DEFAULTS["epsilon"]

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigValidationError("learning_rate", f"must be > 0, got {self.learning_rate}")
        if not 0 <= self.beta1 < 1:
            raise ConfigValidationError("beta1", f"must be in [0, 1), got {self.beta1}")
        if not 0 <= self.beta2 < 1:
            raise ConfigValidationError("beta2", f"must be in [0, 1), got {self.beta2}")
        if not self.epsilon > 0:
            raise ConfigValidationError("epsilon", f"must be > 0, got {self.epsilon}")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def adam_step(p: Parameter, cfg: AdamConfig) -> Parameter:
    """
    One bias-corrected Adam update of a single parameter; zeroes its gradient

    Args:
        p: parameter with a populated gradient
        cfg: hyperparameters

    Returns:
        The same parameter, updated in place
    """
    g = p.grad if p.grad is not None else np.zeros_like(p.data)
    p.step_count += 1
    t = p.step_count

    p.adam_m *= cfg.beta1
    p.adam_m += (1.0 - cfg.beta1) * g
    p.adam_v *= cfg.beta2
    p.adam_v += (1.0 - cfg.beta2) * (g * g)

    m_hat = p.adam_m / (1.0 - cfg.beta1 ** t)
    v_hat = p.adam_v / (1.0 - cfg.beta2 ** t)
    p.data -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)

    p.zero_grad()
    return p


class Adam:
    """Applies adam_step to a fixed list of parameters"""

    def __init__(self, parameters: Iterable[Parameter], config: AdamConfig):
        self.parameters: List[Parameter] = list(parameters)
        self.config = config

    def step(self) -> None:
        for p in self.parameters:
            adam_step(p, self.config)

    def zero_grad(self) -> None:
        for p in self.parameters:
            p.zero_grad()
