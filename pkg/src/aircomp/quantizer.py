"""Uniform M-level quantizer used by the digital schemes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class UniformQuantizer:
    """M levels spanning a closed interval, step = width / (M - 1).

    Level i sits at ``lo + i * step``; ``quantize`` snaps to the nearest
    level index so quantize(dequantize(i)) == i.
    """

    levels: int
    range: tuple[float, float]

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError("need at least 2 quantizer levels")
        lo, hi = self.range
        if not hi > lo:
            raise ValueError("quantizer range must be nondegenerate")

    @property
    def step(self) -> float:
        lo, hi = self.range
        return (hi - lo) / (self.levels - 1)

    def quantize(self, x) -> np.ndarray:
        lo, _ = self.range
        idx = np.rint((np.asarray(x, dtype=float) - lo) / self.step).astype(int)
        return np.clip(idx, 0, self.levels - 1)

    def dequantize(self, idx) -> np.ndarray:
        lo, _ = self.range
        return lo + np.asarray(idx, dtype=float) * self.step

    def grid(self) -> np.ndarray:
        """All level values, lowest first."""
        return self.dequantize(np.arange(self.levels))
