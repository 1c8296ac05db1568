"""The modified Galilean transformation between the laboratory (psi) frame
and the decaying (phi) frame.

phi_k(t, x) = psi_k(t, x + u t) * exp(-i {U_inf.x + M_k t} / eps)

with drift u = U_inf - eps^eta * A_inf and the phase constants M_k.  The
spatial shift is an exact spectral translation; the plane-wave factor is
sampled, which requires the resonance condition U_inf L / (2 pi eps) to be
an integer pair so the factor is grid-periodic.
"""

from __future__ import annotations

import numpy as np

from .grid import Grid2D
from .params import SimParams
from .waves import WavePair


def drift_velocity(params: SimParams) -> np.ndarray:
    """u = U_inf - eps^eta * A_inf."""
    return params.U - params.eps**params.eta * params.Ainf


def phase_constants(params: SimParams) -> tuple[float, float]:
    """The time-phase constants (M1, M2) of the transformation."""
    a1, a2 = params.a
    common = 0.5 * (np.dot(params.U, params.U)
                    - params.eps ** (2 * params.eta) * np.dot(params.Ainf, params.Ainf))
    m1 = common - params.V_inf - (1.0 + (params.gamma - 1.0) * a2)
    m2 = common - params.V_inf - (1.0 + (params.gamma - 1.0) * a1)
    return float(m1), float(m2)


def _require_resonant(params: SimParams, grid: Grid2D):
    if not params.is_resonant(grid.L):
        raise ValueError(
            "non-resonant parameters: U_inf L / (2 pi eps) = "
            f"{params.resonance_index(grid.L)} is not an integer pair, so the "
            "plane-wave factor cannot be sampled on the grid"
        )


def _plane_wave(params: SimParams, grid: Grid2D) -> np.ndarray:
    """exp(i U_inf . x / eps) sampled on the grid."""
    return np.exp(1j * (params.U[0] * grid.x1 + params.U[1] * grid.x2)
                  / params.eps)


def forward(pair: WavePair, params: SimParams, grid: Grid2D) -> WavePair:
    """psi-frame pair -> phi-frame pair at the pair's time stamp."""
    if pair.frame != "psi":
        raise ValueError("forward expects a psi-frame pair")
    _require_resonant(params, grid)
    t = pair.t
    u = drift_velocity(params)
    m1, m2 = phase_constants(params)
    wave = _plane_wave(params, grid)
    out = []
    for c, m in ((pair.c1, m1), (pair.c2, m2)):
        shifted = grid.shift(c, u * t)
        out.append(shifted * np.conj(wave) * np.exp(-1j * m * t / params.eps))
    return WavePair(out[0], out[1], frame="phi", t=t)


def inverse(pair: WavePair, params: SimParams, grid: Grid2D) -> WavePair:
    """phi-frame pair -> psi-frame pair at the pair's time stamp."""
    if pair.frame != "phi":
        raise ValueError("inverse expects a phi-frame pair")
    _require_resonant(params, grid)
    t = pair.t
    u = drift_velocity(params)
    m1, m2 = phase_constants(params)
    wave = _plane_wave(params, grid)
    # psi(x) = phi(x - u t) * exp(i {U_inf.(x - u t) + M_k t} / eps)
    const = -float(np.dot(params.U, u)) * t
    out = []
    for c, m in ((pair.c1, m1), (pair.c2, m2)):
        shifted = grid.shift(c, -u * t)
        out.append(shifted * wave
                   * np.exp(1j * (const + m * t) / params.eps))
    return WavePair(out[0], out[1], frame="psi", t=t)
