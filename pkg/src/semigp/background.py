"""Generators for the rotating field A(t, x) and the trap potential V(t, x).

The rotating field follows the three-zone structure: solid rotation
omega0(t) * (-x2, x1) inside radius R1, the constant omega0(t) * A_inf
outside R2, and a divergence-free blend in between.  The blend is built
from a stream function (A is the perpendicular gradient of a scalar), so
div A = 0 holds identically rather than approximately.

Both generators are time-separable and evaluate at arbitrary coordinate
arrays, which the GP solver uses for the drift-shifted fields.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import erf


def _erf_blend(r, center, width):
    """Smooth transition 0 -> 1 around `center`.

    The Gaussian profile keeps the sampled field band-limited in practice
    (spectral divergence at machine level on moderate grids) while the
    tails drop below round-off within a few widths, so the three-zone
    structure holds to working precision.
    """
    return 0.5 * (1.0 + erf((r - center) / width))


def _erf_blend_deriv(r, center, width):
    return np.exp(-((r - center) / width) ** 2) / (np.sqrt(np.pi) * width)


@dataclass
class OmegaProfile:
    """Closed-form rotation rate omega0(t) = base + amp * sin(freq * t)."""

    base: float = 1.0
    amp: float = 0.0
    freq: float = 1.0

    def __call__(self, t: float) -> float:
        return self.base + self.amp * np.sin(self.freq * t)

    def deriv(self, t: float) -> float:
        return self.amp * self.freq * np.cos(self.freq * t)

    @property
    def constant(self) -> bool:
        return self.amp == 0.0


@dataclass
class RotatingFieldSpec:
    """Rotating field generator.

    mode 'paper_example' is the three-zone field; 'uniform_constant' is the
    spatially uniform omega0(t) * A_inf.
    """

    mode: str = "paper_example"
    A_inf: tuple[float, float] = (0.0, 0.0)
    omega: OmegaProfile = None
    R1: float = 3.0
    R2: float = 6.0

    def __post_init__(self):
        if self.omega is None:
            self.omega = OmegaProfile()
        if self.mode not in ("paper_example", "uniform_constant"):
            raise ValueError(f"unknown rotating field mode {self.mode!r}")
        if self.mode == "paper_example" and not self.R1 < self.R2:
            raise ValueError("need R1 < R2")

    def validate_for_grid(self, L: float) -> None:
        if self.mode == "paper_example" and self.R2 >= L / 2:
            raise ValueError("blend radius R2 exceeds the box (need R2 < L/2)")

    def _parts(self, x1, x2):
        """(inner, outer) with A(t, x) = omega0(t) * inner + outer.

        Both parts come from stream functions (A is a perpendicular
        gradient), so each is divergence-free identically.  The outer part
        equals A_inf wherever the blend has saturated, so the far-field
        value never depends on omega0.
        """
        a1, a2 = self.A_inf
        shape = np.broadcast(x1, x2).shape
        if self.mode == "uniform_constant":
            inner = np.zeros((2,) + shape)
            outer = np.stack([np.full(shape, a1), np.full(shape, a2)])
            return inner, outer

        r = np.hypot(x1, x2)
        center = 0.5 * (self.R1 + self.R2)
        width = (self.R2 - self.R1) / 6.0
        s = _erf_blend(r, center, width)
        ds_dr = _erf_blend_deriv(r, center, width)
        with np.errstate(invalid="ignore", divide="ignore"):
            inv_r = np.where(r > 0, 1.0 / r, 0.0)
        # inner stream function (1-s) r^2 / 2 -> solid rotation under the cap
        rad_in = -0.5 * ds_dr * inv_r * r**2
        d_in1 = (1.0 - s) * x1 + rad_in * x1
        d_in2 = (1.0 - s) * x2 + rad_in * x2
        inner = np.stack([-d_in2, d_in1])
        # outer stream function s * (a2 x1 - a1 x2) -> the constant A_inf
        phi_inf = a2 * x1 - a1 * x2
        rad_out = ds_dr * inv_r * phi_inf
        d_out1 = rad_out * x1 + s * a2
        d_out2 = rad_out * x2 - s * a1
        outer = np.stack([-d_out2, d_out1])
        return inner, outer


def eval_A(spec: RotatingFieldSpec, grid, t: float, coords=None):
    """Rotating field sampled on the grid (or at explicit coordinates)."""
    spec.validate_for_grid(grid.L)
    x1, x2 = coords if coords is not None else (grid.x1, grid.x2)
    inner, outer = spec._parts(x1, x2)
    return spec.omega(t) * inner + outer


def eval_dA_dt(spec: RotatingFieldSpec, grid, t: float, coords=None):
    """Analytic time derivative of eval_A (time enters only via omega0)."""
    x1, x2 = coords if coords is not None else (grid.x1, grid.x2)
    inner, _outer = spec._parts(x1, x2)
    return spec.omega.deriv(t) * inner


@dataclass
class TrapPotentialSpec:
    """Trap potential V = V_inf + amp * g(t) * exp(-r^2 / width^2).

    g(t) = 1 + time_amp * sin(time_freq * t).  amp = 0 gives the constant
    trap.  The Gaussian must decay below round-off at the box boundary.
    """

    V_inf: float = 0.0
    amp: float = 0.0
    width: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)
    time_amp: float = 0.0
    time_freq: float = 1.0

    def validate_for_grid(self, L: float) -> None:
        if self.amp != 0.0 and self.width > L / 10.0:
            raise ValueError(
                "trap bump too wide for the box: V - V_inf must vanish near "
                "the boundary (need width <= L/10)"
            )

    def _g(self, t):
        return 1.0 + self.time_amp * np.sin(self.time_freq * t)

    def _dg(self, t):
        return self.time_amp * self.time_freq * np.cos(self.time_freq * t)

    def _bump(self, x1, x2):
        cx, cy = self.center
        return np.exp(-((x1 - cx) ** 2 + (x2 - cy) ** 2) / self.width**2)


def eval_V(spec: TrapPotentialSpec, grid, t: float, coords=None):
    spec.validate_for_grid(grid.L)
    x1, x2 = coords if coords is not None else (grid.x1, grid.x2)
    if spec.amp == 0.0:
        return np.full(np.broadcast(x1, x2).shape, spec.V_inf)
    return spec.V_inf + spec.amp * spec._g(t) * spec._bump(x1, x2)


def eval_dV(spec: TrapPotentialSpec, grid, t: float, coords=None):
    """(dV/dt, grad V), both in closed form."""
    x1, x2 = coords if coords is not None else (grid.x1, grid.x2)
    shape = np.broadcast(x1, x2).shape
    if spec.amp == 0.0:
        return np.zeros(shape), np.zeros((2,) + shape)
    bump = spec._bump(x1, x2)
    dt_v = spec.amp * spec._dg(t) * bump
    cx, cy = spec.center
    common = spec.amp * spec._g(t) * bump * (-2.0 / spec.width**2)
    grad_v = np.stack([common * (x1 - cx), common * (x2 - cy)])
    return dt_v, grad_v
