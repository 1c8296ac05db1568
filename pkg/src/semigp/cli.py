"""Command-line surface.

Exit codes: 0 success, 2 configuration error, 3 solver abort,
4 acceptance failure in report mode.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from .config import ConfigError, RunConfig
from .euler import BlowupAbort
from .galilean import forward, inverse
from .grid import Grid2D
from .io import SnapshotError, read_snapshot, write_snapshot, write_timeseries
from .run import epsilon_scan, preparedness, reload_report, run_single
from .waves import WavePair

EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_ACCEPT = 4


def _fail(code: int, message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load(config_path, out, cadence, strict, seed) -> RunConfig:
    try:
        cfg = RunConfig.load(config_path)
        if out:
            cfg.out_dir = out
        if cadence:
            cfg.cadence = cadence
        cfg.validate()
    except ConfigError as exc:
        _fail(EXIT_CONFIG, str(exc))
    if seed is not None:
        np.random.seed(seed)  # reserved; nothing here draws randomness yet
    if strict:
        p = cfg.params
        if np.any(p.U != 0.0) and not p.is_resonant(cfg.L):
            _fail(EXIT_CONFIG,
                  "strict mode: non-resonant U_inf for this box "
                  f"(index {p.resonance_index(cfg.L)})")
    return cfg


common_options = [
    click.option("--out", type=click.Path(), default=None,
                 help="Output directory (overrides the config)."),
    click.option("--cadence", type=float, default=None,
                 help="Diagnostics cadence in time units."),
    click.option("--threads", type=int, default=1, show_default=True),
    click.option("--seed", type=int, default=None,
                 help="Seed reserved for future randomized features."),
    click.option("--strict", is_flag=True,
                 help="Fail on resonance warnings instead of proceeding."),
]


def with_common(fn):
    for opt in reversed(common_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Semiclassical verification toolkit for the rotating two-component
    condensate and its hydrodynamic limit."""


@main.command("simulate-gp")
@click.argument("config", type=click.Path(exists=True))
@with_common
def simulate_gp(config, out, cadence, threads, seed, strict):
    """Evolve the wave system plus the limit reference and record
    diagnostics."""
    cfg = _load(config, out, cadence, strict, seed)
    manifest = run_single(cfg)
    click.echo(f"rows={manifest['rows']} stop={manifest['stop_reason']}")
    click.echo(f"timeseries: {manifest['artifacts']['timeseries']}")
    if manifest["stop_reason"] != "completed":
        sys.exit(EXIT_ABORT)


@dataclass
class _HydroRecord:
    t: float
    rho_hat_l2: float
    u_hat_l2: float

    FIELDS = ("t", "rho_hat_l2", "u_hat_l2")

    def row(self):
        return [self.t, self.rho_hat_l2, self.u_hat_l2]


@main.command("simulate-euler")
@click.argument("config", type=click.Path(exists=True))
@with_common
def simulate_euler(config, out, cadence, threads, seed, strict):
    """Evolve only the limiting hydrodynamic system."""
    cfg = _load(config, out, cadence, strict, seed)
    from .run import build_problem
    (params, grid, _chi, _pair0, _rho0, _u0, hydro0,
     _solver, euler, _data) = build_problem(cfg)
    out_dir = Path(cfg.out_dir) / "euler"
    out_dir.mkdir(parents=True, exist_ok=True)
    code = 0
    try:
        traj = euler.evolve(hydro0, params.T, cadence=cfg.effective_cadence)
    except BlowupAbort as exc:
        traj = exc.trajectory
        click.echo(f"aborted: {exc}", err=True)
        code = EXIT_ABORT
    records = [_HydroRecord(s.t, grid.l2norm(s.rho_hat), grid.l2norm(s.u_hat))
               for s in traj.states]
    write_timeseries(records, out_dir / "hydro_timeseries.csv")
    final = traj.states[-1]
    write_snapshot(final.rho_hat, out_dir / "final_rho_hat.snap", grid.L,
                   t=final.t)
    write_snapshot(final.u_hat, out_dir / "final_u_hat.snap", grid.L,
                   t=final.t)
    click.echo(f"rows={len(records)} out={out_dir}")
    sys.exit(code)


@main.command("scan-epsilon")
@click.argument("config", type=click.Path(exists=True))
@click.option("--eps", "eps_csv", required=True,
              help="Comma-separated strictly decreasing epsilon list.")
@with_common
def scan_epsilon(config, eps_csv, out, cadence, threads, seed, strict):
    """Run the epsilon scan and emit the convergence report."""
    cfg = _load(config, out, cadence, strict, seed)
    try:
        eps_list = [float(v) for v in eps_csv.split(",") if v.strip()]
        report = epsilon_scan(cfg, eps_list, threads=threads)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    for name, slope in sorted(report.slopes.items()):
        mono = "monotone" if report.monotone[name] else "non-monotone"
        click.echo(f"{name}: slope={slope:.3f} ({mono})")
    click.echo("PASS" if report.passed else
               "FAIL: " + "; ".join(report.failures))


@main.command("check-initdata")
@click.argument("config", type=click.Path(exists=True))
@with_common
def check_initdata(config, out, cadence, threads, seed, strict):
    """Print the well-preparedness report of the configured data."""
    cfg = _load(config, out, cadence, strict, seed)
    rep = preparedness(cfg)
    click.echo(f"eps = {rep.eps:g}")
    click.echo(f"quantum kinetic  q1 = {rep.q1[0]:.3e}, {rep.q1[1]:.3e}")
    click.echo(f"velocity match   q2 = {rep.q2[0]:.3e}, {rep.q2[1]:.3e}")
    click.echo(f"density match    q2_rho = {rep.q2_rho:.3e}")
    click.echo(f"component overlap q3 = {rep.q3:.3e}")
    click.echo(f"H(0) = {rep.H0:.6e}  "
               f"(assembly gap {rep.consistency_gap(cfg.params.gamma):.1e})")


@main.command("transform")
@click.argument("snapshot", type=click.Path(exists=True))
@click.option("--to", "target", type=click.Choice(["psi", "phi"]),
              required=True)
@click.option("--config", "config_path", type=click.Path(exists=True),
              required=True, help="Config providing the parameter set.")
@with_common
def transform(snapshot, target, config_path, out, cadence, threads, seed,
              strict):
    """Apply the frame transformation to a stored wave-pair snapshot."""
    cfg = _load(config_path, out, cadence, strict, seed)
    try:
        obj, L = read_snapshot(snapshot)
    except SnapshotError as exc:
        _fail(EXIT_CONFIG, str(exc))
    if not isinstance(obj, WavePair):
        _fail(EXIT_CONFIG, "snapshot does not hold a wave pair")
    if abs(L - cfg.L) > 1e-12:
        _fail(EXIT_CONFIG, f"snapshot box L={L} does not match config L={cfg.L}")
    grid = Grid2D(L, obj.c1.shape[0])
    try:
        if obj.frame == target:
            result = obj
        elif target == "phi":
            result = forward(obj, cfg.params, grid)
        else:
            result = inverse(obj, cfg.params, grid)
    except ValueError as exc:
        _fail(EXIT_CONFIG, str(exc))
    dest = Path(out) if out else Path(snapshot).parent
    dest.mkdir(parents=True, exist_ok=True)
    path = dest / (Path(snapshot).stem + f".{target}.snap")
    write_snapshot(result, path, L)
    click.echo(str(path))


@main.command("report")
@click.argument("scan_dir", type=click.Path(exists=True))
@with_common
def report(scan_dir, out, cadence, threads, seed, strict):
    """Re-derive the scan report from stored raw series."""
    try:
        rep = reload_report(scan_dir)
    except (OSError, ValueError, KeyError) as exc:
        _fail(EXIT_CONFIG, f"cannot rebuild report: {exc}")
    for name, slope in sorted(rep.slopes.items()):
        mono = "monotone" if rep.monotone[name] else "non-monotone"
        click.echo(f"{name}: slope={slope:.3f} ({mono})")
    if not rep.passed:
        click.echo("FAIL: " + "; ".join(rep.failures))
        sys.exit(EXIT_ACCEPT)
    click.echo("PASS")


if __name__ == "__main__":
    main()
