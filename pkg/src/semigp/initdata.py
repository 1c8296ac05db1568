"""Madelung construction of initial wave functions and the
well-preparedness report for the smallness assumptions on the data.

Phases are stored as the decaying perturbation s_k with S_k = U_inf.x + s_k,
because U_inf.x is not periodic; the plane-wave factor is only sampled when
the resonance condition makes it grid-periodic.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .background import RotatingFieldSpec, eval_A
from .grid import Grid2D
from .params import SimParams
from .waves import WavePair

DENSITY_FLOOR = 1e-6


@dataclass
class MadelungData:
    """Initial densities and decaying phase perturbations."""

    rho1: np.ndarray
    rho2: np.ndarray
    s1: np.ndarray  # S_1 - U_inf . x
    s2: np.ndarray

    def __post_init__(self):
        if np.any(self.rho1 < 0) or np.any(self.rho2 < 0):
            raise ValueError("densities must be nonnegative")


@dataclass
class PreparednessReport:
    """Quadrature values of the well-preparedness quantities at t = 0."""

    eps: float
    q1: tuple[float, float]  # eps^2 * int |grad sqrt(rho_k0)|^2
    q2: tuple[float, float]  # || ((grad S_k0 - A0) - u0) sqrt(rho_k0) ||_L2^2
    q2_rho: float            # || rho_10 + rho_20 - rho_0 ||_L2^2
    q3: float                # int rho_10 * rho_20
    H0: float

    def consistency_gap(self, gamma: float) -> float:
        """|H0 - assembly from the parts|; should be round-off."""
        assembled = (
            0.5 * sum(self.q1)
            + 0.5 * sum(self.q2)
            + 0.5 * self.q2_rho
            + (gamma - 1.0) * self.q3
        )
        return abs(self.H0 - assembled)


def madelung(data: MadelungData, params: SimParams, grid: Grid2D,
             frame: str = "phi") -> WavePair:
    """Build the wave pair sqrt(rho_k) * exp(i S_k / eps).

    frame 'phi' absorbs the exp(i U_inf.x / eps) factor analytically (the
    production path); frame 'psi' samples it and requires the resonance
    condition, otherwise a warning is issued.
    """
    amp1 = np.sqrt(data.rho1)
    amp2 = np.sqrt(data.rho2)
    if frame == "phi":
        phase1 = data.s1 / params.eps
        phase2 = data.s2 / params.eps
    elif frame == "psi":
        if not params.is_resonant(grid.L):
            warnings.warn(
                "sampling exp(i U_inf.x / eps) on a non-resonant grid; the "
                "plane-wave factor is not periodic",
                stacklevel=2,
            )
        ux = params.U[0] * grid.x1 + params.U[1] * grid.x2
        phase1 = (ux + data.s1) / params.eps
        phase2 = (ux + data.s2) / params.eps
    else:
        raise ValueError(f"unknown frame {frame!r}")
    return WavePair(amp1 * np.exp(1j * phase1), amp2 * np.exp(1j * phase2),
                    frame=frame, t=0.0)


def well_prepared_report(data: MadelungData, u0: np.ndarray, rho0: np.ndarray,
                         A0: np.ndarray, params: SimParams,
                         grid: Grid2D) -> PreparednessReport:
    """Evaluate the smallness quantities of the data by grid quadrature."""
    eps = params.eps
    q1 = []
    q2 = []
    for rho_k, s_k in ((data.rho1, data.s1), (data.rho2, data.s2)):
        q1.append(eps**2 * grid.integrate(np.sum(grid.grad(np.sqrt(rho_k)) ** 2,
                                                 axis=0)))
        vel_gap = params.U[:, None, None] + grid.grad(s_k) - A0 - u0
        q2.append(grid.integrate(rho_k * np.sum(vel_gap**2, axis=0)))
    q2_rho = grid.l2norm(data.rho1 + data.rho2 - rho0) ** 2
    q3 = grid.integrate(data.rho1 * data.rho2)
    H0 = (0.5 * sum(q1) + 0.5 * sum(q2) + 0.5 * q2_rho
          + (params.gamma - 1.0) * q3)
    return PreparednessReport(eps=eps, q1=tuple(q1), q2=tuple(q2),
                              q2_rho=q2_rho, q3=q3, H0=H0)


def canonical_family(params: SimParams, grid: Grid2D, amplitude: float,
                     a_spec: RotatingFieldSpec | None = None,
                     amplitude2: float = 0.0):
    """A concrete well-prepared family: Gaussian density bump on the occupied
    component, a shared decaying phase perturbation, and limit data chosen so
    the velocity-matching condition holds exactly (H(0) is then purely the
    eps^2 kinetic part, plus the overlap term when amplitude2 > 0).

    amplitude2 puts a small bump into the empty component (exploratory mode);
    scans scale it with eps to keep the data well prepared.  The limit data
    (rho0, u0) exclude that bump.

    Returns (MadelungData, rho0, u0).
    """
    a1, a2 = params.a
    L = grid.L
    bump = np.exp(-(grid.r / (L / 10.0)) ** 2)
    cx = L / 12.0
    phase = np.exp(-(((grid.x1 - cx) ** 2 + grid.x2**2) / (L / 12.0) ** 2))
    bump2 = np.exp(-(((grid.x1 + cx) ** 2 + grid.x2**2) / (L / 12.0) ** 2))

    rho1 = a1 + (amplitude * bump if a1 > 0 else 0.0)
    rho2 = a2 + (amplitude * bump if a2 > 0 else 0.0)
    if amplitude2 != 0.0:
        if a1 == 0.0:
            rho1 = rho1 + amplitude2 * bump2
        else:
            rho2 = rho2 + amplitude2 * bump2
    rho1 = np.broadcast_to(np.asarray(rho1, dtype=float), bump.shape).copy()
    rho2 = np.broadcast_to(np.asarray(rho2, dtype=float), bump.shape).copy()
    for a_k, rho_k in ((a1, rho1), (a2, rho2)):
        if a_k > 0 and rho_k.min() < DENSITY_FLOOR:
            raise ValueError("amplitude drives the density below the "
                             f"positivity floor {DENSITY_FLOOR}")
    if rho1.min() < 0 or rho2.min() < 0:
        raise ValueError("negative density in canonical family")

    s = amplitude * phase
    data = MadelungData(rho1=rho1, rho2=rho2, s1=s.copy(), s2=s.copy())

    # the limit density matches the wave densities exactly, except for the
    # exploratory second-component bump which vanishes with eps by policy
    rho0 = rho1 + rho2
    if amplitude2 != 0.0:
        rho0 = rho0 - amplitude2 * bump2
    # For eta > 0 the rotating field drops out of the limit system, so the
    # eps-independent limit velocity carries no gauge contribution.
    if a_spec is None or params.eta > 0:
        A0 = np.zeros((2, grid.N, grid.N))
    else:
        A0 = eval_A(a_spec, grid, 0.0)
    u0 = params.U[:, None, None] + grid.grad(s) - A0
    return data, rho0, u0
