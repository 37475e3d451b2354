"""Two-hot categorical encoding of scalars over a fixed support.

Reward and value heads predict distributions over evenly spaced bin centers;
scalars encode as a two-hot interpolation between the adjacent bins and
decode as the expectation over centers. In-range values round-trip exactly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CategoricalSupport:
    v_min: float
    v_max: float
    count: int

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("support needs at least 2 bins")
        if not self.v_min < self.v_max:
            raise ValueError("support range must be non-empty")

    @property
    def centers(self) -> np.ndarray:
        return np.linspace(self.v_min, self.v_max, self.count)

    @property
    def step(self) -> float:
        return (self.v_max - self.v_min) / (self.count - 1)


def scalar_to_categorical(x, support: CategoricalSupport) -> np.ndarray:
    """Two-hot encode ``x`` (scalar or array); out-of-range values clamp."""
    x = np.asarray(x, dtype=np.float64)
    flat = np.clip(x.reshape(-1), support.v_min, support.v_max)
    pos = (flat - support.v_min) / support.step
    lo = np.floor(pos).astype(np.int64)
    lo = np.minimum(lo, support.count - 1)
    frac = pos - lo
    out = np.zeros((flat.size, support.count))
    rows = np.arange(flat.size)
    out[rows, lo] = 1.0 - frac
    hi = np.minimum(lo + 1, support.count - 1)
    out[rows, hi] += frac
    return out.reshape(x.shape + (support.count,))


def categorical_to_scalar(probs, support: CategoricalSupport):
    """Expectation over bin centers; inverse of the two-hot encoding."""
    probs = np.asarray(probs, dtype=np.float64)
    result = probs @ support.centers
    return float(result) if result.ndim == 0 else result
