"""Coupled periodic Camassa-Holm system: spectral solver, blowup criterion and diagnostics."""

from .characteristics import CharacteristicTrack
from .config import RunConfig, build_initial, load_config, parse_config
from .criterion import CriterionReport, compute_K, evaluate
from .dynamics import SolutionState, apriori_check, rhs_state, rhs_w, rhs_wx
from .evolution import RunRecord, StepControl, energy, run, step_rk4
from .grid import PeriodicField, PeriodicGrid, derivative, h1_norm_sq, interpolate
from .kernel import conv_dp, conv_p, conv_p_minus, conv_p_plus

__version__ = "0.1.0"

__all__ = [
    "CharacteristicTrack",
    "CriterionReport",
    "PeriodicField",
    "PeriodicGrid",
    "RunConfig",
    "RunRecord",
    "SolutionState",
    "StepControl",
    "apriori_check",
    "build_initial",
    "compute_K",
    "conv_dp",
    "conv_p",
    "conv_p_minus",
    "conv_p_plus",
    "derivative",
    "energy",
    "evaluate",
    "h1_norm_sq",
    "interpolate",
    "load_config",
    "parse_config",
    "rhs_state",
    "rhs_w",
    "rhs_wx",
    "run",
    "step_rk4",
]
