"""Run configuration: one file describes a complete experiment.

The on-disk format is YAML with stable key names grouped by concern.
parse -> serialize -> parse is idempotent.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from .background import OmegaProfile, RotatingFieldSpec, TrapPotentialSpec
from .gp import StepperConfig
from .grid import Grid2D, ObstacleSpec
from .params import SimParams


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    params: SimParams = dataclasses.field(default_factory=SimParams)
    L: float = 16.0
    N: int = 128
    obstacle: ObstacleSpec = dataclasses.field(default_factory=ObstacleSpec)
    rotating_field: RotatingFieldSpec = dataclasses.field(
        default_factory=lambda: RotatingFieldSpec(mode="uniform_constant"))
    trap: TrapPotentialSpec = dataclasses.field(
        default_factory=TrapPotentialSpec)
    stepper: StepperConfig = dataclasses.field(default_factory=StepperConfig)
    amplitude: float = 0.1
    amplitude2: float = 0.0
    euler_cfl: float = 0.4
    chi_radius: float | None = None
    cadence: float | None = None       # default T / 8
    out_dir: str = "runs"
    overlap_constant_in_flux: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.L <= 0 or self.N < 8 or self.N % 2:
            raise ConfigError("need L > 0 and even N >= 8")
        if self.cadence is not None and self.cadence <= 0:
            raise ConfigError("cadence must be positive")
        self.rotating_field.validate_for_grid(self.L)
        self.trap.validate_for_grid(self.L)
        if self.trap.V_inf != self.params.V_inf:
            raise ConfigError("trap.V_inf must match params.V_inf")
        rf_inf = tuple(float(v) for v in self.rotating_field.A_inf)
        if rf_inf != tuple(float(v) for v in self.params.A_inf):
            raise ConfigError("rotating_field.A_inf must match params.A_inf")

    @property
    def effective_cadence(self) -> float:
        return self.cadence if self.cadence is not None else self.params.T / 8

    def make_grid(self) -> Grid2D:
        return Grid2D(self.L, self.N, self.obstacle)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        def clean(obj):
            if dataclasses.is_dataclass(obj):
                return {f.name: clean(getattr(obj, f.name))
                        for f in dataclasses.fields(obj)}
            if isinstance(obj, tuple):
                return [clean(v) for v in obj]
            return obj

        return {
            "model": clean(self.params),
            "grid": {"L": self.L, "N": self.N,
                     "obstacle": clean(self.obstacle)},
            "rotating_field": clean(self.rotating_field),
            "trap": clean(self.trap),
            "stepper": clean(self.stepper),
            "initial_data": {"amplitude": self.amplitude,
                             "amplitude2": self.amplitude2},
            "euler": {"cfl": self.euler_cfl},
            "diagnostics": {
                "chi_radius": self.chi_radius,
                "cadence": self.cadence,
                "overlap_constant_in_flux": self.overlap_constant_in_flux,
            },
            "output": {"out_dir": self.out_dir},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        try:
            model = dict(d.get("model", {}))
            for key in ("a", "U_inf", "A_inf"):
                if key in model:
                    model[key] = tuple(model[key])
            grid = d.get("grid", {})
            obstacle = dict(grid.get("obstacle", {}))
            if "center" in obstacle:
                obstacle["center"] = tuple(obstacle["center"])
            rf = dict(d.get("rotating_field", {}))
            if "A_inf" in rf:
                rf["A_inf"] = tuple(rf["A_inf"])
            if isinstance(rf.get("omega"), dict):
                rf["omega"] = OmegaProfile(**rf["omega"])
            trap = dict(d.get("trap", {}))
            if "center" in trap:
                trap["center"] = tuple(trap["center"])
            init = d.get("initial_data", {})
            diag = d.get("diagnostics", {})
            return cls(
                params=SimParams(**model),
                L=float(grid.get("L", 16.0)),
                N=int(grid.get("N", 128)),
                obstacle=ObstacleSpec(**obstacle),
                rotating_field=RotatingFieldSpec(**rf),
                trap=TrapPotentialSpec(**trap),
                stepper=StepperConfig(**d.get("stepper", {})),
                amplitude=float(init.get("amplitude", 0.1)),
                amplitude2=float(init.get("amplitude2", 0.0)),
                euler_cfl=float(d.get("euler", {}).get("cfl", 0.4)),
                chi_radius=diag.get("chi_radius"),
                cadence=diag.get("cadence"),
                overlap_constant_in_flux=bool(
                    diag.get("overlap_constant_in_flux", True)),
                out_dir=str(d.get("output", {}).get("out_dir", "runs")),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid configuration: {exc}") from exc

    def save(self, path) -> None:
        Path(path).write_text(
            yaml.safe_dump(self.to_dict(), sort_keys=True))

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            d = yaml.safe_load(Path(path).read_text())
        except yaml.YAMLError as exc:
            raise ConfigError(f"cannot parse config file: {exc}") from exc
        if not isinstance(d, dict):
            raise ConfigError("config file must contain a mapping")
        return cls.from_dict(d)
