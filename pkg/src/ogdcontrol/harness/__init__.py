"""Scenarios, validation pipeline, closed-loop runs and the command line."""
from .builtin import benchmark_scenario, integrator_scenario, stable_scalar_scenario
from .generate import random_scenario
from .runner import (EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION, EXIT_VIOLATION, RunResult,
                     check_trace, execute, recompute_regret, run_scenario, sweep, sweep_csv)
from .scenario import (Scenario, Setup, build_schedule, load_scenario, prepare,
                       scenario_from_dict, scenario_to_toml, validate_scenario)

__all__ = [
    "EXIT_OK", "EXIT_SOLVER", "EXIT_VALIDATION", "EXIT_VIOLATION", "RunResult", "Scenario",
    "Setup", "benchmark_scenario", "build_schedule", "check_trace", "execute",
    "integrator_scenario", "load_scenario", "prepare", "random_scenario", "recompute_regret",
    "run_scenario", "scenario_from_dict", "scenario_to_toml", "stable_scalar_scenario", "sweep",
    "sweep_csv", "validate_scenario",
]
