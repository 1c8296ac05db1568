"""Run orchestration: single runs with artifacts, and the epsilon scan.

The scan keeps the hydrodynamic initial data and the limit-system
reference fixed across epsilon: only the Madelung exponent (and the small
second-component amplitude, which is scaled with epsilon to stay well
prepared) sees the semiclassical parameter.
"""

from __future__ import annotations

import dataclasses
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig
from .diagnostics import collect_record, loglog_slope
from .euler import BlowupAbort, EulerSolver, HydroState, HydroTrajectory
from .gp import GpSolver, SolverAbort
from .grid import build_cutoff, default_cutoff_radius
from .initdata import canonical_family, madelung, well_prepared_report
from .io import write_snapshot, write_timeseries


def _versions() -> dict:
    return {
        "semigp": __version__,
        "numpy": np.__version__,
        "python": ".".join(map(str, sys.version_info[:3])),
    }


def build_problem(config: RunConfig, eps: float | None = None):
    """Grid, cutoff, parameter set and initial data for one run.

    Returns (params, grid, chi, pair0, rho0_full, u0_full, hydro0, solver).
    The second-component amplitude is scaled proportionally to eps so the
    exploratory family stays well prepared along the scan.
    """
    grid = config.make_grid()
    chi = build_cutoff(grid, config.chi_radius or default_cutoff_radius(grid))
    params = config.params
    if eps is not None:
        params = dataclasses.replace(params, eps=eps)
    amp2 = config.amplitude2 * params.eps / config.params.eps
    data, rho0, u0 = canonical_family(params, grid, config.amplitude,
                                      a_spec=config.rotating_field,
                                      amplitude2=amp2)
    pair0 = madelung(data, params, grid, frame="phi")
    solver = GpSolver(params, grid, a_spec=config.rotating_field,
                      v_spec=config.trap, cfg=config.stepper, frame="phi")
    euler = EulerSolver.from_specs(params, grid, a_spec=config.rotating_field,
                                   v_spec=config.trap, cfl=config.euler_cfl)
    rho0_full = np.broadcast_to(np.asarray(rho0, dtype=float),
                                grid.x1.shape).copy()
    hydro0 = HydroState(rho0_full - euler.rho_inf,
                        u0 - euler.u_inf[:, None, None])
    return params, grid, chi, pair0, rho0_full, u0, hydro0, solver, euler, data


def _records_from(traj, etraj: HydroTrajectory, params, grid, chi, config):
    rho_inf = params.a[0] + params.a[1]
    u_inf = params.U - params.Ainf if params.eta == 0 else params.U
    records = []
    n = min(len(traj.times), len(etraj.times))
    for i in range(n):
        es = etraj.states[i]
        rho = rho_inf + es.rho_hat
        u = u_inf[:, None, None] + es.u_hat
        records.append(collect_record(traj.pairs[i], params, grid, rho, u,
                                      chi, a_spec=config.rotating_field,
                                      v_spec=config.trap))
    return records


def run_single(config: RunConfig, out_dir=None, label: str = "run") -> dict:
    """Evolve both systems, write artifacts, return the manifest dict."""
    t_wall = time.perf_counter()
    out = Path(out_dir or config.out_dir) / label
    out.mkdir(parents=True, exist_ok=True)
    (params, grid, chi, pair0, rho0, u0, hydro0,
     solver, euler, _data) = build_problem(config)
    cadence = config.effective_cadence

    stop_reason = "completed"
    try:
        etraj = euler.evolve(hydro0, params.T, cadence=cadence)
    except BlowupAbort as exc:
        etraj = exc.trajectory
        stop_reason = f"euler_abort_at_t={exc.last_good_t:.6g}"
    try:
        traj = solver.evolve(pair0, params.T, cadence=cadence)
    except SolverAbort as exc:
        traj = exc.trajectory
        stop_reason = f"gp_abort_at_t={exc.last_good_t:.6g}"

    records = _records_from(traj, etraj, params, grid, chi, config)

    config.save(out / "config.yaml")
    write_timeseries(records, out / "timeseries.csv")
    write_snapshot(traj.pairs[0], out / "initial_phi.snap", grid.L)
    write_snapshot(traj.pairs[-1], out / "final_phi.snap", grid.L)
    manifest = {
        "params": dataclasses.asdict(params),
        "grid": {"L": grid.L, "N": grid.N},
        "versions": _versions(),
        "stop_reason": stop_reason,
        "wall_seconds": time.perf_counter() - t_wall,
        "rows": len(records),
        "final": dict(zip(records[-1].FIELDS, records[-1].row())),
        "artifacts": {
            "config": str(out / "config.yaml"),
            "timeseries": str(out / "timeseries.csv"),
            "initial_snapshot": str(out / "initial_phi.snap"),
            "final_snapshot": str(out / "final_phi.snap"),
        },
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2,
                                                  sort_keys=True))
    return manifest


def preparedness(config: RunConfig):
    """PreparednessReport of the configured initial data."""
    (params, grid, _chi, _pair0, rho0, u0, _hydro0,
     solver, _euler, data) = build_problem(config)
    A0 = solver.gauge_field(0.0) if params.eta == 0 else np.zeros_like(u0)
    if params.eta == 0:
        A0 = A0 + params.Ainf[:, None, None]
    return well_prepared_report(data, u0, rho0, A0, params, grid)


# ---------------------------------------------------------------------------
# the epsilon scan
# ---------------------------------------------------------------------------

SUP_METRICS = ("H_wave", "density_gap", "momentum_gap", "momentum_gap_l1",
               "momentum_gap_c1", "momentum_gap_c2", "overlap")


@dataclass
class ScanReport:
    eps: list
    sup_metrics: dict            # metric -> list aligned with eps
    slopes: dict                 # metric -> log-log slope (nan if degenerate)
    monotone: dict               # metric -> sup decreasing with eps?
    passed: bool = False
    failures: list = field(default_factory=list)
    series_paths: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ScanReport":
        return cls(**d)


def _sup_of(records, name: str) -> float:
    idx = records[0].FIELDS.index(name)
    return max(abs(r.row()[idx]) for r in records)


def assemble_report(eps_list, sup_metrics, series_paths=None,
                    slope_threshold: float = 0.8) -> ScanReport:
    slopes = {}
    monotone = {}
    for name, sups in sup_metrics.items():
        vals = np.asarray(sups, dtype=float)
        monotone[name] = bool(np.all(np.diff(vals) < 0))  # eps is decreasing
        if np.all(vals > 0):
            slopes[name] = loglog_slope(eps_list, vals)
        else:
            slopes[name] = float("nan")
    failures = []
    if not monotone["H_wave"]:
        failures.append("sup_t H not monotone in eps")
    if not (slopes["H_wave"] >= slope_threshold):
        failures.append(
            f"H slope {slopes['H_wave']:.3f} below {slope_threshold}")
    if not monotone["density_gap"]:
        failures.append("density gap not monotone in eps")
    if not monotone["momentum_gap_l1"]:
        failures.append("momentum gap (windowed L1) not monotone in eps")
    return ScanReport(eps=list(map(float, eps_list)),
                      sup_metrics=sup_metrics, slopes=slopes,
                      monotone=monotone, passed=not failures,
                      failures=failures, series_paths=series_paths or {})


def epsilon_scan(base: RunConfig, eps_list, out_dir=None,
                 threads: int = 1) -> ScanReport:
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 3:
        raise ValueError("scan needs at least 3 epsilon values")
    if not all(a > b for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("epsilon values must be strictly decreasing")

    out = Path(out_dir or base.out_dir) / "scan"
    out.mkdir(parents=True, exist_ok=True)
    cadence = base.effective_cadence

    # the limit system is eps-free: solve it once and share the reference
    (params0, grid, chi, _pair0, _rho0, _u0, hydro0,
     _solver, euler, _data) = build_problem(base, eps=eps_list[0])
    etraj = euler.evolve(hydro0, params0.T, cadence=cadence)

    def one(eps: float):
        (params, _grid, _chi, pair0, _r, _u, _h,
         solver, _e, _d) = build_problem(base, eps=eps)
        try:
            traj = solver.evolve(pair0, params.T, cadence=cadence)
            note = None
        except SolverAbort as exc:
            traj = exc.trajectory
            note = f"gp_abort_at_t={exc.last_good_t:.6g}"
        records = _records_from(traj, etraj, params, grid, chi, base)
        return records, note

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, eps_list))
    else:
        results = [one(e) for e in eps_list]

    sup_metrics = {name: [] for name in SUP_METRICS}
    series_paths = {}
    failures_notes = []
    for eps, (records, note) in zip(eps_list, results):
        path = out / f"timeseries_eps{eps:g}.csv"
        write_timeseries(records, path)
        series_paths[f"{eps:g}"] = str(path)
        for name in SUP_METRICS:
            sup_metrics[name].append(_sup_of(records, name))
        if note:
            failures_notes.append(f"eps={eps:g}: {note}")

    report = assemble_report(eps_list, sup_metrics, series_paths)
    report.failures.extend(failures_notes)
    if failures_notes:
        report.passed = False
    write_scan_artifacts(report, out)
    return report


def write_scan_artifacts(report: ScanReport, out_dir) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "scan_report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True))
    # plot-ready summary: one row per eps
    lines = ["eps," + ",".join("sup_" + m for m in SUP_METRICS)]
    for i, eps in enumerate(report.eps):
        row = [format(eps, ".17g")]
        row += [format(report.sup_metrics[m][i], ".17g") for m in SUP_METRICS]
        lines.append(",".join(row))
    (out / "scan_summary.csv").write_text("\n".join(lines) + "\n")


def reload_report(scan_dir) -> ScanReport:
    """Rebuild the report from stored raw series (reproducibility path)."""
    out = Path(scan_dir)
    stored = json.loads((out / "scan_report.json").read_text())
    prior = ScanReport.from_dict(stored)
    from .io import read_timeseries
    sup_metrics = {name: [] for name in SUP_METRICS}
    for eps in prior.eps:
        path = prior.series_paths[f"{eps:g}"]
        fields, rows = read_timeseries(path)
        for name in SUP_METRICS:
            idx = fields.index(name)
            sup_metrics[name].append(max(abs(r[idx]) for r in rows))
    report = assemble_report(prior.eps, sup_metrics, prior.series_paths)
    write_scan_artifacts(report, out)
    return report
