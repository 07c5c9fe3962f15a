"""Uniformly sampled functions on [0, T_max] with sup-norm semantics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class GridFunction:
    step: float
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if not self.step > 0:
            raise InputError(f"grid step must be positive, got {self.step}")
        if vals.ndim != 1 or vals.size < 2:
            raise InputError("grid function needs a 1-D array of at least two samples")
        if not np.all(np.isfinite(vals)):
            raise InputError("grid function has non-finite samples")
        object.__setattr__(self, "values", vals)

    @classmethod
    def sample(cls, func, step: float, t_max: float) -> "GridFunction":
        return cls(step, np.asarray(func(grid_points(step, t_max))))

    @property
    def t(self) -> np.ndarray:
        return self.step * np.arange(self.values.size)

    @property
    def t_max(self) -> float:
        return self.step * (self.values.size - 1)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def tail_max(self, fraction: float = 0.05) -> float:
        m = max(1, int(round(fraction * self.values.size)))
        return float(np.max(np.abs(self.values[-m:])))


def grid_points(step: float, t_max: float) -> np.ndarray:
    n = int(round(t_max / step))
    if abs(n * step - t_max) > 1e-9 * max(1.0, t_max):
        raise InputError(f"t_max={t_max} is not a multiple of step={step}")
    return step * np.arange(n + 1)
