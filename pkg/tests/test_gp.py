import numpy as np
import pytest

from semigp import Grid2D, SimParams, WavePair
from semigp.background import RotatingFieldSpec
from semigp.gp import (GpSolver, SolverAbort, StepperConfig, covariant_grad,
                       magnetic_laplacian)
from semigp.initdata import MadelungData, canonical_family, madelung

from conftest import resonant_U


def test_covariant_operators_consistency(grid32):
    """Magnetic Laplacian equals the covariant divergence of the covariant
    gradient when div A = 0."""
    rng = np.random.default_rng(9)
    f = grid32.dealias(rng.standard_normal((32, 32))
                       + 1j * rng.standard_normal((32, 32)))
    A = grid32.dealias(np.stack([-grid32.x2, grid32.x1]))
    A = np.stack([grid32.dealias(A[0]), grid32.dealias(A[1])])
    eps, eta = 0.3, 0.5
    g = covariant_grad(grid32, f, A, eps, eta)
    div_g = (eps * grid32.div(g)
             - eps**eta * 1j * (A[0] * g[0] + A[1] * g[1]))
    lap = magnetic_laplacian(grid32, grid32.dealias(f), A, eps, eta)
    # compare on dealiased content only (products alias at full bandwidth)
    assert grid32.l2norm(grid32.dealias(div_g - lap)) < 1e-7


def plane_wave_setup(N=64, eps=0.1, gamma=1.5):
    L = 16.0
    grid = Grid2D(L, N)
    p = SimParams(eps=eps, U_inf=resonant_U(L, eps, (2, 0)), a=(1.0, 0.0),
                  gamma=gamma, V_inf=0.0, T=0.5)
    shape = (N, N)
    data = MadelungData(rho1=np.ones(shape), rho2=np.zeros(shape),
                        s1=np.zeros(shape), s2=np.zeros(shape))
    return grid, p, madelung(data, p, grid, frame="psi")


def test_plane_wave_oracle_psi_frame():
    grid, p, pair0 = plane_wave_setup()
    solver = GpSolver(p, grid, frame="psi")
    traj = solver.evolve(pair0, 0.5, cadence=0.25)
    E = 0.5 * float(np.dot(p.U, p.U)) + p.V_inf + 1.0
    ux = p.U[0] * grid.x1 + p.U[1] * grid.x2
    exact = np.exp(1j * (ux - E * 0.5) / p.eps)
    assert np.abs(traj.pairs[-1].c1 - exact).max() < 1e-10
    assert np.abs(traj.pairs[-1].c2).max() == 0.0


def test_flat_state_is_fixed_point_phi_frame(grid64):
    p = SimParams(eps=0.1, U_inf=(0.0, 0.0), T=0.5)
    pair0 = WavePair(np.ones((64, 64), complex), np.zeros((64, 64), complex))
    solver = GpSolver(p, grid64, frame="phi")
    traj = solver.evolve(pair0, 0.5, cadence=0.5)
    assert np.abs(traj.pairs[-1].c1 - 1.0).max() < 1e-12


def test_mass_conserved(grid64):
    p = SimParams(eps=0.1, gamma=2.0, T=0.2)
    data, _rho0, _u0 = canonical_family(p, grid64, amplitude=0.1)
    pair0 = madelung(data, p, grid64, frame="phi")
    solver = GpSolver(p, grid64, cfg=StepperConfig(dt=0.01))
    m0 = grid64.integrate(np.abs(pair0.c1) ** 2)
    traj = solver.evolve(pair0, 0.2, cadence=0.2)
    m1 = grid64.integrate(np.abs(traj.pairs[-1].c1) ** 2)
    assert abs(m1 - m0) / m0 < 1e-10


def test_temporal_convergence_order(grid64):
    """IF-RK4 self-convergence on the transformed system."""
    p = SimParams(eps=0.1, gamma=2.0, T=0.05)
    data, _r, _u = canonical_family(p, grid64, amplitude=0.1)
    pair0 = madelung(data, p, grid64, frame="phi")
    errs = []
    ref = GpSolver(p, grid64, cfg=StepperConfig(dt=0.05 / 256)).evolve(
        pair0, 0.05, cadence=0.05).pairs[-1]
    for nsteps in (8, 16, 32):
        got = GpSolver(p, grid64, cfg=StepperConfig(dt=0.05 / nsteps)).evolve(
            pair0, 0.05, cadence=0.05).pairs[-1]
        errs.append(np.abs(got.c1 - ref.c1).max())
    orders = [np.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) > 3.7


def test_residual_scales_with_snapshot_spacing(grid64):
    p = SimParams(eps=0.1, gamma=2.0, T=0.1)
    data, _r, _u = canonical_family(p, grid64, amplitude=0.1)
    pair0 = madelung(data, p, grid64, frame="phi")
    solver = GpSolver(p, grid64, cfg=StepperConfig(dt=0.1 / 512))
    res = []
    for cad in (0.0125, 0.00625):
        traj = solver.evolve(pair0, 0.1, cadence=cad)
        i = len(traj.times) // 2
        res.append(max(solver.residual(traj, i)))
    ratio = res[0] / res[1]
    assert 3.0 < ratio < 5.0  # centered differences: O(cadence^2)


def test_strang_matches_ifrk4_without_gauge_field(grid64):
    p = SimParams(eps=0.1, gamma=1.0, T=0.1)
    data, _r, _u = canonical_family(p, grid64, amplitude=0.1)
    pair0 = madelung(data, p, grid64, frame="phi")
    a = GpSolver(p, grid64, cfg=StepperConfig(dt=2e-4)).evolve(
        pair0, 0.1, cadence=0.1).pairs[-1]
    b = GpSolver(p, grid64, cfg=StepperConfig(dt=2e-4, scheme="strang",
                                              dealias=False)).evolve(
        pair0, 0.1, cadence=0.1).pairs[-1]
    assert np.abs(a.c1 - b.c1).max() < 1e-6


def test_strang_rejects_gauge_field(grid64):
    p = SimParams(eps=0.1, A_inf=(0.05, 0.0), T=0.1)
    spec = RotatingFieldSpec(mode="paper_example", A_inf=(0.05, 0.0),
                             R1=1.5, R2=6.0)
    pair0 = WavePair(np.ones((64, 64), complex), np.zeros((64, 64), complex))
    solver = GpSolver(p, grid64, a_spec=spec,
                      cfg=StepperConfig(scheme="strang"))
    with pytest.raises(ValueError, match="Strang"):
        solver.evolve(pair0, 0.1, cadence=0.1)


def test_nan_abort_carries_last_good_time(grid64):
    p = SimParams(eps=0.1, T=0.2)
    bad = np.ones((64, 64), complex)
    bad[0, 0] = np.nan
    pair0 = WavePair(bad, np.zeros((64, 64), complex))
    solver = GpSolver(p, grid64)
    with pytest.raises(SolverAbort) as info:
        solver.evolve(pair0, 0.2, cadence=0.1)
    assert info.value.last_good_t == 0.0
    assert info.value.trajectory.stop_reason == "nan_abort"


def test_default_dt_policy(grid64):
    p = SimParams(eps=0.2, T=0.1)
    pair0 = WavePair(np.ones((64, 64), complex), np.zeros((64, 64), complex))
    solver = GpSolver(p, grid64)
    assert solver.default_dt(pair0) <= 0.5 * p.eps + 1e-15


def test_obstacle_penalization_drives_outflow():
    """The repulsive barrier builds an outward phase gradient: early-time
    current on a ring around the obstacle points radially outward."""
    from semigp import ObstacleSpec
    from semigp.diagnostics import psi_fields
    grid = Grid2D(16.0, 64, ObstacleSpec(kind="disk", radius=1.0,
                                         strength=50.0))
    p = SimParams(eps=0.1, T=0.02)
    pair0 = WavePair(np.ones((64, 64), complex), np.zeros((64, 64), complex))
    traj = GpSolver(p, grid).evolve(pair0, 0.02, cadence=0.02)
    F = psi_fields(traj.pairs[-1], p, grid)
    ring = (grid.r > 0.8) & (grid.r < 1.6)
    radial = ((F.J1[0] * grid.x1 + F.J1[1] * grid.x2)
              / np.maximum(grid.r, 1e-12))
    assert radial[ring].min() > 0.1
