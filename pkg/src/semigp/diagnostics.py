"""Observables: modulated energy, cutoff energy, balance-law residuals and
the gap norms against the limit system.

Everything is evaluated from the phi-frame solution.  Writing the lab-frame
field as psi_k = w_k * exp(i Theta_k / eps) with grad Theta_k = U_inf and
w_k(x) = phi_k(x - u t), every observable below depends only on w_k and

    D_k := eps grad w_k + i (U_inf - eps^eta A) w_k,

which equals exp(-i Theta_k / eps) times the covariant gradient of psi_k.
The unimodular factor cancels in densities, currents and all quadratic
forms, so nothing here requires the resonance condition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .background import (RotatingFieldSpec, TrapPotentialSpec, eval_A,
                         eval_dA_dt, eval_dV, eval_V)
from .galilean import drift_velocity
from .grid import CutoffField, Grid2D
from .initdata import DENSITY_FLOOR
from .params import SimParams
from .waves import WavePair


@dataclass
class PsiFields:
    """Lab-frame observables with the plane-wave factor stripped."""

    w1: np.ndarray
    w2: np.ndarray
    D1: np.ndarray  # (2, N, N) complex
    D2: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    J1: np.ndarray  # (2, N, N) real
    J2: np.ndarray
    A: np.ndarray
    t: float

    @property
    def pairs(self):
        return ((self.w1, self.D1, self.rho1, self.J1),
                (self.w2, self.D2, self.rho2, self.J2))


def psi_fields(pair: WavePair, params: SimParams, grid: Grid2D,
               a_spec: RotatingFieldSpec | None = None) -> PsiFields:
    """Build the lab-frame observables from a phi-frame snapshot."""
    if pair.frame != "phi":
        raise ValueError("psi_fields expects a phi-frame pair")
    t = pair.t
    u = drift_velocity(params)
    if a_spec is None:
        a_spec = RotatingFieldSpec(mode="uniform_constant", A_inf=params.A_inf)
    A = eval_A(a_spec, grid, t)
    gauge = params.U[:, None, None] - params.eps**params.eta * A
    out = []
    for c in pair.components:
        w = grid.shift(c, -u * t) if np.any(u * t != 0.0) else c.copy()
        D = params.eps * grid.grad(w) + 1j * gauge * w
        rho = np.abs(w) ** 2
        J = np.imag(np.conj(w)[None, :, :] * D)
        out.append((w, D, rho, J))
    (w1, D1, rho1, J1), (w2, D2, rho2, J2) = out
    return PsiFields(w1, w2, D1, D2, rho1, rho2, J1, J2, A, t)


def component_masses(pair: WavePair, params: SimParams,
                     grid: Grid2D) -> tuple[float, float]:
    """int (rho_k - a_k); frame independent, conserved in time."""
    rho1, rho2 = pair.densities()
    return (grid.integrate(rho1 - params.a[0]),
            grid.integrate(rho2 - params.a[1]))


# ---------------------------------------------------------------------------
# modulated energy and gap norms
# ---------------------------------------------------------------------------

@dataclass
class ModulatedEnergy:
    total: float
    kinetic: float
    density_part: float
    overlap_part: float
    form: str
    floored: bool = False


def modulated_energy(fields: PsiFields, rho: np.ndarray, u: np.ndarray,
                     params: SimParams, grid: Grid2D,
                     form: str = "wave") -> ModulatedEnergy:
    """H(t) against the limit fields (rho, u), both given as full fields.

    form 'wave' uses the covariant gradients; 'hydro' uses the equivalent
    sqrt(rho_k)/current expression (with an independent spectral gradient,
    so the two forms agree only up to discretization).  The hydro form
    skips grid points where a component density is below the positivity
    floor and flags the result.
    """
    gamma = params.gamma
    dens = 0.5 * grid.integrate((fields.rho1 + fields.rho2 - rho) ** 2)
    over = (gamma - 1.0) * grid.integrate(fields.rho1 * fields.rho2)
    floored = False
    kin = 0.0
    if form == "wave":
        for w, D, _rho, _J in fields.pairs:
            rel = D - 1j * u * w[None, :, :]
            kin += 0.5 * grid.integrate(np.sum(np.abs(rel) ** 2, axis=0))
    elif form == "hydro":
        eps = params.eps
        for _w, _D, rho_k, J_k in fields.pairs:
            mask = rho_k >= DENSITY_FLOOR
            if not mask.all():
                floored = True
            g = grid.grad(np.sqrt(np.maximum(rho_k, 0.0)))
            quantum = 0.5 * eps**2 * np.sum(g**2, axis=0)
            slip = J_k - rho_k * u
            with np.errstate(divide="ignore", invalid="ignore"):
                drift = 0.5 * np.sum(slip**2, axis=0) / rho_k
            kin += grid.integrate(np.where(mask, quantum + drift, 0.0))
    else:
        raise ValueError(f"unknown form {form!r}")
    return ModulatedEnergy(total=kin + dens + over, kinetic=kin,
                           density_part=dens, overlap_part=over,
                           form=form, floored=floored)


def density_gap(fields: PsiFields, rho: np.ndarray, grid: Grid2D) -> float:
    return grid.l2norm(fields.rho1 + fields.rho2 - rho)


def momentum_gap(fields: PsiFields, rho: np.ndarray, u: np.ndarray,
                 grid: Grid2D) -> float:
    gap = fields.J1 + fields.J2 - rho * u
    return float(np.sqrt(grid.integrate(np.sum(gap**2, axis=0))))


def momentum_gap_l1(fields: PsiFields, rho: np.ndarray, u: np.ndarray,
                    grid: Grid2D, radius: float) -> float:
    """L1 norm of the total-momentum gap over the window |x| <= radius."""
    gap = fields.J1 + fields.J2 - rho * u
    window = grid.r <= radius
    return grid.integrate(np.hypot(gap[0], gap[1]) * window)


def component_momentum_gaps(fields: PsiFields, u: np.ndarray, grid: Grid2D,
                            radius: float):
    """Windowed L1 norms of J_k - rho_k u, the per-component version of the
    momentum convergence (each component's current locks to its own density
    times the limit velocity)."""
    window = grid.r <= radius
    out = []
    for rho_k, J_k in ((fields.rho1, fields.J1), (fields.rho2, fields.J2)):
        gap = J_k - rho_k * u
        out.append(grid.integrate(np.hypot(gap[0], gap[1]) * window))
    return tuple(out)


def overlap(fields: PsiFields, grid: Grid2D) -> float:
    return grid.integrate(fields.rho1 * fields.rho2)


# ---------------------------------------------------------------------------
# cutoff energy and its exact rate
# ---------------------------------------------------------------------------

def energy_chi(fields: PsiFields, chi: CutoffField, params: SimParams,
               grid: Grid2D, v_spec: TrapPotentialSpec | None = None) -> float:
    """The renormalized energy e(t) built with the cutoff chi."""
    if v_spec is None:
        v_spec = TrapPotentialSpec(V_inf=params.V_inf)
    V = eval_V(v_spec, grid, fields.t)
    u_inf = drift_velocity(params)
    s_tot = params.a[0] + params.a[1]
    c = chi.values
    total = 0.0
    for w, D, rho_k, _J in fields.pairs:
        inner = 0.5 * np.sum(np.abs(D) ** 2, axis=0) + (V + 1.0) * rho_k
        rel = D - 1j * u_inf[:, None, None] * w[None, :, :]
        outer = 0.5 * np.sum(np.abs(rel) ** 2, axis=0)
        total += grid.integrate(inner * (1.0 - c) + outer * c
                                + (V - params.V_inf) * rho_k * c)
    total += 0.5 * grid.integrate((fields.rho1 + fields.rho2 - s_tot) ** 2)
    total += (params.gamma - 1.0) * grid.integrate(fields.rho1 * fields.rho2)
    return total


def energy_chi_rate(fields: PsiFields, chi: CutoffField, params: SimParams,
                    grid: Grid2D,
                    a_spec: RotatingFieldSpec | None = None,
                    v_spec: TrapPotentialSpec | None = None,
                    overlap_constant_in_flux: bool = True) -> float:
    """Closed-form de/dt from the conservation identity.

    The current-flux bracket can be taken with or without the constant
    (gamma - 1) a_{k*}; the two readings differ only when the current flux
    through the cutoff transition ring is nonzero.  The default keeps it.
    """
    p = params
    if v_spec is None:
        v_spec = TrapPotentialSpec(V_inf=p.V_inf)
    if a_spec is None:
        a_spec = RotatingFieldSpec(mode="uniform_constant", A_inf=p.A_inf)
    t = fields.t
    u_inf = drift_velocity(p)
    gradchi = chi.gradient
    c = chi.values
    udotg = u_inf[0] * gradchi[0] + u_inf[1] * gradchi[1]
    lap_udotg = grid.lap(udotg)
    dt_a = eval_dA_dt(a_spec, grid, t)
    curl_a = grid.curl(fields.A)
    dt_v, grad_v = eval_dV(v_spec, grid, t)
    u_perp = np.array([-u_inf[1], u_inf[0]])
    rot = dt_a + curl_a * u_perp[:, None, None]
    s_tot = p.a[0] + p.a[1]
    a_star = (p.a[1], p.a[0])

    rate = 0.0
    for k, (w, D, rho_k, J_k) in enumerate(fields.pairs):
        # stress flux through the transition ring
        Du = D[0] * u_inf[0] + D[1] * u_inf[1]
        rate -= grid.integrate(
            np.real(Du * (np.conj(D[0]) * gradchi[0]
                          + np.conj(D[1]) * gradchi[1])))
        rate += 0.25 * p.eps**2 * grid.integrate(lap_udotg * rho_k)
        coef = 0.5 * float(np.dot(u_inf, u_inf)) - s_tot - p.V_inf
        if overlap_constant_in_flux:
            coef -= (p.gamma - 1.0) * a_star[k]
        rate += coef * grid.integrate(J_k[0] * gradchi[0]
                                      + J_k[1] * gradchi[1])
        rate -= p.eps**p.eta * grid.integrate(
            (dt_a[0] * J_k[0] + dt_a[1] * J_k[1]) * (1.0 - c))
        slip = J_k - u_inf[:, None, None] * rho_k
        rate -= p.eps**p.eta * grid.integrate(
            (rot[0] * slip[0] + rot[1] * slip[1]) * c)
        rate += grid.integrate(dt_v * rho_k)
        rate += grid.integrate(
            (grad_v[0] * u_inf[0] + grad_v[1] * u_inf[1]) * rho_k * c)
    quart = 0.5 * ((fields.rho1 + fields.rho2) ** 2 - s_tot**2) \
        + (p.gamma - 1.0) * fields.rho1 * fields.rho2
    rate -= grid.integrate(quart * udotg)
    return rate


# ---------------------------------------------------------------------------
# local balance-law residuals
# ---------------------------------------------------------------------------

def mass_residuals(prev: PsiFields, mid: PsiFields, nxt: PsiFields,
                   grid: Grid2D) -> tuple[float, float]:
    """|| dt rho_k + div J_k ||_L2, time derivative by centered differences."""
    dt2 = nxt.t - prev.t
    out = []
    for rp, rm, rn, J in ((prev.rho1, mid.rho1, nxt.rho1, mid.J1),
                          (prev.rho2, mid.rho2, nxt.rho2, mid.J2)):
        drho = (rn - rp) / dt2
        out.append(grid.l2norm(drho + grid.div(J)))
    return tuple(out)


def momentum_residual(prev: PsiFields, mid: PsiFields, nxt: PsiFields,
                      params: SimParams, grid: Grid2D,
                      a_spec: RotatingFieldSpec | None = None,
                      v_spec: TrapPotentialSpec | None = None) -> float:
    """Max over components j of the L2 residual of the momentum identity."""
    p = params
    if v_spec is None:
        v_spec = TrapPotentialSpec(V_inf=p.V_inf)
    if a_spec is None:
        a_spec = RotatingFieldSpec(mode="uniform_constant", A_inf=p.A_inf)
    t = mid.t
    dt2 = nxt.t - prev.t
    dt_a = eval_dA_dt(a_spec, grid, t)
    curl_a = grid.curl(mid.A)
    _dt_v, grad_v = eval_dV(v_spec, grid, t)

    rho_sum = mid.rho1 + mid.rho2
    lap_rho = grid.lap(mid.rho1) + grid.lap(mid.rho2)
    cross = mid.rho1 * mid.rho2
    worst = 0.0
    for j in (0, 1):
        jstar = 1 - j
        res = (prev.J1[j] + prev.J2[j]) * 0.0
        res += ((nxt.J1[j] + nxt.J2[j]) - (prev.J1[j] + prev.J2[j])) / dt2
        stress = np.zeros_like(res)
        for D in (mid.D1, mid.D2):
            for ell in (0, 1):
                stress += grid.grad(np.real(np.conj(D[ell]) * D[j]))[ell]
        res += stress
        res -= 0.25 * p.eps**2 * grid.grad(lap_rho)[j]
        res += grad_v[j] * rho_sum
        res += 0.5 * grid.grad(mid.rho1**2 + mid.rho2**2)[j]
        res += p.gamma * grid.grad(cross)[j]
        res += p.eps**p.eta * dt_a[j] * rho_sum
        sign = -1.0 if j == 0 else 1.0
        res += sign * p.eps**p.eta * curl_a * (mid.J1[jstar] + mid.J2[jstar])
        worst = max(worst, grid.l2norm(res))
    return worst


# ---------------------------------------------------------------------------
# scan summaries
# ---------------------------------------------------------------------------

def loglog_slope(eps_values, quantity_values) -> float:
    """Least-squares slope of log(quantity) against log(eps)."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log(np.asarray(quantity_values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class DiagnosticsRecord:
    """One row of the time-series output."""

    t: float
    mass1: float
    mass2: float
    H_wave: float
    H_hydro: float
    hydro_floored: bool
    density_gap: float
    momentum_gap: float
    momentum_gap_l1: float
    momentum_gap_c1: float
    momentum_gap_c2: float
    overlap: float
    energy_chi: float

    FIELDS = ("t", "mass1", "mass2", "H_wave", "H_hydro", "hydro_floored",
              "density_gap", "momentum_gap", "momentum_gap_l1",
              "momentum_gap_c1", "momentum_gap_c2", "overlap", "energy_chi")

    def row(self):
        return [getattr(self, f) for f in self.FIELDS]


def collect_record(pair: WavePair, params: SimParams, grid: Grid2D,
                   rho: np.ndarray, u: np.ndarray, chi: CutoffField,
                   a_spec: RotatingFieldSpec | None = None,
                   v_spec: TrapPotentialSpec | None = None) -> DiagnosticsRecord:
    """Evaluate the standard observables for one snapshot."""
    fields = psi_fields(pair, params, grid, a_spec)
    m1, m2 = component_masses(pair, params, grid)
    hw = modulated_energy(fields, rho, u, params, grid, form="wave")
    hh = modulated_energy(fields, rho, u, params, grid, form="hydro")
    window = 2.0 * chi.R
    mg1, mg2 = component_momentum_gaps(fields, u, grid, window)
    return DiagnosticsRecord(
        t=pair.t, mass1=m1, mass2=m2,
        H_wave=hw.total, H_hydro=hh.total, hydro_floored=hh.floored,
        density_gap=density_gap(fields, rho, grid),
        momentum_gap=momentum_gap(fields, rho, u, grid),
        momentum_gap_l1=momentum_gap_l1(fields, rho, u, grid, window),
        momentum_gap_c1=mg1, momentum_gap_c2=mg2,
        overlap=overlap(fields, grid),
        energy_chi=energy_chi(fields, chi, params, grid, v_spec))
