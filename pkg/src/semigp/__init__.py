"""Simulation and verification toolkit for the semiclassical limit of a
rotating two-component condensate with non-vanishing far-field states."""

__version__ = "0.1.0"

from .grid import CutoffField, Grid2D, ObstacleSpec, build_cutoff, make_grid
from .params import SimParams
from .waves import WavePair
from .background import OmegaProfile, RotatingFieldSpec, TrapPotentialSpec
from .galilean import drift_velocity, forward, inverse, phase_constants
from .initdata import (MadelungData, PreparednessReport, canonical_family,
                       madelung, well_prepared_report)
from .gp import GpSolver, SolverAbort, StepperConfig, Trajectory
from .euler import BlowupAbort, EulerSolver, HydroState, euler_rhs, mms_fields
from .config import ConfigError, RunConfig
from .run import ScanReport, epsilon_scan, run_single

__all__ = [
    "__version__",
    "Grid2D", "ObstacleSpec", "CutoffField", "build_cutoff", "make_grid",
    "SimParams", "WavePair",
    "OmegaProfile", "RotatingFieldSpec", "TrapPotentialSpec",
    "drift_velocity", "forward", "inverse", "phase_constants",
    "MadelungData", "PreparednessReport", "canonical_family", "madelung",
    "well_prepared_report",
    "GpSolver", "SolverAbort", "StepperConfig", "Trajectory",
    "EulerSolver", "BlowupAbort", "HydroState", "euler_rhs", "mms_fields",
    "RunConfig", "ConfigError",
    "ScanReport", "epsilon_scan", "run_single",
]
