"""Axis-aligned boxes (interval vectors)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box { x : lower <= x <= upper } (componentwise)."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float)).copy()
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float)).copy()
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("box bounds must be equal-length vectors")
        if np.any(lo > hi):
            raise ValueError("box has lower[j] > upper[j]")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower

    def contains(self, x, tol: float = 1e-12) -> bool:
        x = np.asarray(x, dtype=float).ravel()
        if x.shape[0] != self.dim:
            raise ValueError("point dimension mismatch")
        return bool(
            np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol)
        )

    def is_bounded(self) -> bool:
        return bool(np.all(np.isfinite(self.lower))
                    and np.all(np.isfinite(self.upper)))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Uniform draw; degenerate dimensions return their fixed value."""
        return rng.uniform(self.lower, self.upper)

    @staticmethod
    def symmetric(radius, dim: int | None = None) -> "Box":
        r = np.asarray(radius, dtype=float)
        if r.ndim == 0:
            if dim is None:
                raise ValueError("scalar radius needs an explicit dim")
            r = np.full(dim, float(r))
        return Box(-r, r)

    @staticmethod
    def point(x) -> "Box":
        x = np.asarray(x, dtype=float).ravel()
        return Box(x, x)
