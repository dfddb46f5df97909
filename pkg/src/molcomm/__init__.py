"""Discrete-time molecular communication: channel model, capacity bounds, scaling sweeps."""

from .arrival import (
    DistributionError,
    FirstArrivalDist,
    cdf,
    from_table,
    load_table,
    make_brownian1d,
    make_geometric,
    sample_delay,
    sample_delays,
)
from .bounds import (
    BoundName,
    BoundReport,
    arrangements,
    binary_entropy,
    binomial_entropy_bound,
    ub_joint,
    ub_molecules,
    ub_time,
)
from .channel import (
    ArrivalRecord,
    InputEnsemble,
    ReleasePattern,
    all_patterns,
    capacity_small,
    conditional_law,
    exact_mi,
    transmit,
)
from .harness import SweepSpec, emit, fit_scaling, run_sweep

__version__ = "0.1.0"
