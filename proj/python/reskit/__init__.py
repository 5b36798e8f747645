"""Resilience toolkit for finite control systems under uncertainty.

Thin wrapper around the C++ extension module. Models, strategies and regimes
are declared in the same JSON documents the `reskit` CLI reads.
"""

from reskit._reskit import (
    Model,
    Regime,
    ReskitError,
    Strategy,
    all_scenarios,
    brute_force_resilient,
    bundle,
    closed_loop,
    cvar,
    evaluate_risk,
    expectation,
    flow,
    regime_membership,
    resilience_indicator,
    resilient_states,
    robust_recovery_sets,
    robust_viability_kernel,
    stochastic_viability_values,
    worst_case,
)

__all__ = [
    "Model",
    "Regime",
    "ReskitError",
    "Strategy",
    "all_scenarios",
    "brute_force_resilient",
    "bundle",
    "closed_loop",
    "cvar",
    "evaluate_risk",
    "expectation",
    "flow",
    "regime_membership",
    "resilience_indicator",
    "resilient_states",
    "robust_recovery_sets",
    "robust_viability_kernel",
    "stochastic_viability_values",
    "worst_case",
]
