"""Scalar model parameters shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SimParams:
    """All scalar parameters of the model.

    ``theorem_mode`` restricts (a1, a2) to the pure one-component states;
    the exploratory mode admits any nonnegative pair.
    """

    eps: float = 0.1
    eta: float = 0.0
    gamma: float = 1.0
    a: tuple[float, float] = (1.0, 0.0)
    U_inf: tuple[float, float] = (0.0, 0.0)
    A_inf: tuple[float, float] = (0.0, 0.0)
    V_inf: float = 0.0
    T: float = 0.25
    theorem_mode: bool = True

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if self.eta < 0:
            raise ValueError("eta must be nonnegative")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        a1, a2 = self.a
        if a1 < 0 or a2 < 0:
            raise ValueError("a_k must be nonnegative")
        if self.theorem_mode and tuple(self.a) not in ((1.0, 0.0), (0.0, 1.0)):
            raise ValueError("theorem mode requires (a1, a2) = (1,0) or (0,1)")

    @property
    def U(self) -> np.ndarray:
        return np.asarray(self.U_inf, dtype=float)

    @property
    def Ainf(self) -> np.ndarray:
        return np.asarray(self.A_inf, dtype=float)

    def resonance_index(self, L: float) -> np.ndarray:
        """U_inf * L / (2 pi eps): integer components make the plane-wave
        factor exp(i U.x / eps) grid-periodic."""
        return self.U * L / (2.0 * np.pi * self.eps)

    def is_resonant(self, L: float, tol: float = 1e-9) -> bool:
        idx = self.resonance_index(L)
        return bool(np.all(np.abs(idx - np.round(idx)) < tol))
