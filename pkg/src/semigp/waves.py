"""Container for the two complex order parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class WavePair:
    """The two complex order parameters with their frame tag.

    frame 'psi' is the original laboratory frame; 'phi' is the
    Galilean-transformed frame in which both components approach
    sqrt(a_k) near the box boundary.
    """

    c1: np.ndarray
    c2: np.ndarray
    frame: str = "phi"
    t: float = 0.0

    def __post_init__(self):
        if self.frame not in ("psi", "phi"):
            raise ValueError(f"unknown frame {self.frame!r}")

    def copy(self) -> "WavePair":
        return WavePair(self.c1.copy(), self.c2.copy(), self.frame, self.t)

    @property
    def components(self):
        return (self.c1, self.c2)

    def densities(self):
        return np.abs(self.c1) ** 2, np.abs(self.c2) ** 2

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.c1)) and np.all(np.isfinite(self.c2)))
