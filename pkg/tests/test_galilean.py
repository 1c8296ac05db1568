import numpy as np
import pytest

from semigp import SimParams, WavePair
from semigp.galilean import drift_velocity, forward, inverse
from semigp.initdata import MadelungData, madelung


def make_pair(grid, frame, t=0.0, seed=2):
    rng = np.random.default_rng(seed)
    smooth = grid.dealias(rng.standard_normal((grid.N, grid.N))
                          + 1j * rng.standard_normal((grid.N, grid.N)))
    return WavePair(1.0 + 0.1 * smooth, 0.1 * smooth.conj(), frame=frame, t=t)


def test_forward_inverse_roundtrip(grid64, resonant_params):
    p = resonant_params
    for t in (0.0, 0.37):
        pair = make_pair(grid64, "psi", t=t)
        back = inverse(forward(pair, p, grid64), p, grid64)
        assert np.abs(back.c1 - pair.c1).max() < 1e-8
        assert np.abs(back.c2 - pair.c2).max() < 1e-8


def test_frame_tags_enforced(grid64, resonant_params):
    pair = make_pair(grid64, "phi")
    with pytest.raises(ValueError):
        forward(pair, resonant_params, grid64)
    with pytest.raises(ValueError):
        inverse(make_pair(grid64, "psi"), resonant_params, grid64)


def test_non_resonant_rejected(grid64):
    p = SimParams(eps=0.1, U_inf=(0.123, 0.0), T=0.1)
    with pytest.raises(ValueError, match="non-resonant"):
        forward(make_pair(grid64, "psi"), p, grid64)


def test_matches_madelung_at_t0(grid64, resonant_params):
    p = resonant_params
    shape = (64, 64)
    bump = np.exp(-(grid64.r / 2.0) ** 2)
    data = MadelungData(rho1=1.0 + 0.1 * bump, rho2=np.zeros(shape),
                        s1=0.05 * bump, s2=np.zeros(shape))
    psi = madelung(data, p, grid64, frame="psi")
    phi = madelung(data, p, grid64, frame="phi")
    got = forward(psi, p, grid64)
    assert np.abs(got.c1 - phi.c1).max() < 1e-12


def test_plane_wave_maps_to_constant(grid64, resonant_params):
    """The far-field plane wave at t = 0 becomes the flat state sqrt(a_k)."""
    p = resonant_params
    wave = np.exp(1j * (p.U[0] * grid64.x1 + p.U[1] * grid64.x2) / p.eps)
    pair = WavePair(wave, np.zeros_like(wave), frame="psi", t=0.0)
    phi = forward(pair, p, grid64)
    assert np.abs(phi.c1 - 1.0).max() < 1e-12


def test_drift_velocity_eta_scaling():
    p = SimParams(eps=0.04, eta=2.0, U_inf=(0.5, 0.0), A_inf=(1.0, 0.0),
                  T=0.1)
    u = drift_velocity(p)
    assert u[0] == pytest.approx(0.5 - 0.04**2)
