"""Event-synchronization climate networks with surrogate boundary corrections."""

from ._core import (
    GridsyncError,
    Metric,
    __version__,
    build_network,
    correct,
    dedup_consecutive,
    event_sync,
    haversine_km,
    ks_two_sample,
    metric,
    null_threshold_exact,
    paired_t_test,
    run,
    surrogate_mean,
)

__all__ = [
    "GridsyncError",
    "Metric",
    "__version__",
    "build_network",
    "correct",
    "dedup_consecutive",
    "event_sync",
    "haversine_km",
    "ks_two_sample",
    "metric",
    "null_threshold_exact",
    "paired_t_test",
    "run",
    "surrogate_mean",
]
