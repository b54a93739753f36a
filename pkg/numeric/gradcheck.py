"""
Central finite-difference check of analytic gradients
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional

import numpy as np

from config import GRADCHECK_CONFIG
from numeric.tensor import Tensor, backward, no_grad


@dataclass
class CoordinateCheck:
    index: tuple
    analytic: float
    numeric: float
    relative_error: float


@dataclass
class GradCheckReport:
    """Per parameter group results"""
    tolerance: float
    groups: Dict[str, List[CoordinateCheck]] = field(default_factory=dict)

    def worst(self) -> float:
        errors = [c.relative_error for checks in self.groups.values() for c in checks]
        return max(errors) if errors else 0.0

    def failures(self) -> Dict[str, List[CoordinateCheck]]:
        return {
            name: [c for c in checks if c.relative_error > self.tolerance]
            for name, checks in self.groups.items()
            if any(c.relative_error > self.tolerance for c in checks)
        }

    @property
    def passed(self) -> bool:
        return not self.failures()


def relative_error(analytic: float, numeric: float, floor: float = GRADCHECK_CONFIG["magnitude_floor"]) -> float:
    scale = max(abs(analytic), abs(numeric))
    if scale < floor:
        return 0.0
    return abs(analytic - numeric) / scale


def check_gradients(
    loss_fn: Callable[[], Tensor],
    parameters: Mapping[str, Tensor],
    step: float = GRADCHECK_CONFIG["step"],
    tolerance: float = GRADCHECK_CONFIG["tolerance"],
    max_coordinates: Optional[int] = GRADCHECK_CONFIG["max_coordinates"],
    rng: Optional[np.random.Generator] = None,
) -> GradCheckReport:
    """
    Compare backward() against central differences

    Args:
        loss_fn: rebuilds the scalar loss from the current parameter values;
            it must be deterministic (fixed noise, dropout off)
        parameters: named leaf tensors with requires_grad
        max_coordinates: sample at most this many coordinates per group (None = all)

    Returns:
        GradCheckReport
    """
    rng = rng or np.random.default_rng(0)
    for p in parameters.values():
        p.grad = np.zeros_like(p.data)
    backward(loss_fn())
    analytic = {name: p.grad.copy() for name, p in parameters.items()}

    report = GradCheckReport(tolerance=tolerance)
    for name, p in parameters.items():
        flat_count = p.data.size
        if max_coordinates is None or flat_count <= max_coordinates:
            picks = np.arange(flat_count)
        else:
            picks = np.sort(rng.choice(flat_count, size=max_coordinates, replace=False))
        checks = []
        for flat in picks:
            idx = np.unravel_index(flat, p.shape)
            original = p.data[idx]
            with no_grad():
                p.data[idx] = original + step
                plus = loss_fn().item()
                p.data[idx] = original - step
                minus = loss_fn().item()
            p.data[idx] = original
            numeric = (plus - minus) / (2.0 * step)
            a = float(analytic[name][idx])
            checks.append(CoordinateCheck(tuple(int(i) for i in idx), a, numeric, relative_error(a, numeric)))
        report.groups[name] = checks
    return report
