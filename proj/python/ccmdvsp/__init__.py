"""Chance-constrained multi-depot vehicle scheduling."""

from ._core import (
    InputError,
    Instance,
    ScenarioSet,
    ServiceParams,
    generate_instance,
    greedy_evaluate,
    sample_scenarios,
    satisfaction_pct,
    schedule_cost,
    solve_bnc,
    solve_deterministic,
    solve_lagrangian,
)

__all__ = [
    "InputError",
    "Instance",
    "ScenarioSet",
    "ServiceParams",
    "generate_instance",
    "greedy_evaluate",
    "sample_scenarios",
    "satisfaction_pct",
    "schedule_cost",
    "solve_bnc",
    "solve_deterministic",
    "solve_lagrangian",
]
