"""Movable-antenna position optimization (C++ core)."""

from ._core import (
    CSV_HEADER,
    ConfigError,
    RankDeficient,
    ZeroChannel,
    capacity_bits,
    conservative_capacity,
    count_feasible_components,
    diagnose_connectivity,
    fpa_layout,
    min_pairwise_distance,
    project_separation,
    run_monte_carlo,
    run_trial,
    rzf_precoder,
    sum_rate,
    water_filling,
    zf_combiner,
)

__all__ = [
    "CSV_HEADER",
    "ConfigError",
    "RankDeficient",
    "ZeroChannel",
    "capacity_bits",
    "conservative_capacity",
    "count_feasible_components",
    "diagnose_connectivity",
    "fpa_layout",
    "min_pairwise_distance",
    "project_separation",
    "run_monte_carlo",
    "run_trial",
    "rzf_precoder",
    "sum_rate",
    "water_filling",
    "zf_combiner",
]
