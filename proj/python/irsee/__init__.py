"""Energy-efficiency optimization for IRS-aided cell-free massive MIMO."""

from ._core import (
    ChannelSet,
    ScenarioConfig,
    aggregate_channels,
    check_feasibility,
    energy_efficiency,
    evaluate_predictions,
    export_dataset,
    feature_count,
    optimize,
    path_loss,
    penalized_objective,
    percentile_95_likely,
    run_ga,
    run_monte_carlo,
    sample_scenario,
    total_power,
    user_rates,
)

__all__ = [
    "ChannelSet",
    "ScenarioConfig",
    "aggregate_channels",
    "check_feasibility",
    "energy_efficiency",
    "evaluate_predictions",
    "export_dataset",
    "feature_count",
    "optimize",
    "path_loss",
    "penalized_objective",
    "percentile_95_likely",
    "run_ga",
    "run_monte_carlo",
    "sample_scenario",
    "total_power",
    "user_rates",
]
