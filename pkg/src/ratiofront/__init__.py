"""Numerical lab for a ratio-dependent prey-predator system with two
independent Stefan free boundaries."""

from .model import (AprioriBounds, InitialData, ModelParams, SimState, apriori_bounds,
                    reaction_terms, sandwich_rates)
from .semiwave import (SemiWaveQuery, SemiWaveSolution, profile_wave, semiwave_speed,
                       solve_semiwave, speed_monotonicity_check)
from .equilibrium import Equilibrium, closed_form_equilibrium, newton_equilibrium
from .solver import SolverConfig, Trajectory, initial_state, run, run_single_species, step
from .criteria import (CriticalCapacity, ThresholdReport, check_separation,
                       find_critical_capacity, thresholds)
from .diagnostics import (Report, SpeedConstants, classify_outcome, estimate_speed,
                          ray_region_check, speed_bounds_check)
from .config import RunConfig, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "AprioriBounds", "InitialData", "ModelParams", "SimState", "apriori_bounds",
    "reaction_terms", "sandwich_rates",
    "SemiWaveQuery", "SemiWaveSolution", "profile_wave", "semiwave_speed", "solve_semiwave",
    "speed_monotonicity_check",
    "Equilibrium", "closed_form_equilibrium", "newton_equilibrium",
    "SolverConfig", "Trajectory", "initial_state", "run", "run_single_species", "step",
    "CriticalCapacity", "ThresholdReport", "check_separation", "find_critical_capacity",
    "thresholds",
    "Report", "SpeedConstants", "classify_outcome", "estimate_speed", "ray_region_check",
    "speed_bounds_check",
    "RunConfig", "load_config", "parse_config",
]
