"""Deterministic Fukui-Ishibashi traffic cellular automaton with exact flow."""

from .analytics import (
    asymptotic_block_prob,
    exact_block_prob,
    exact_flow,
    hypergeometric_flow,
    steady_block_prob,
    steady_flow,
)
from .engine import (
    Configuration,
    ModelParams,
    block_count,
    block_frequency,
    flow,
    init_random,
    step,
    step_local,
    velocities,
)
from .harness import (
    DiagramTable,
    EnsembleStats,
    FlowSeries,
    emit_table,
    ensemble,
    fundamental_diagram,
    run_series,
    verify_proposition1,
    verify_proposition2,
)
from .preimages import (
    brute_force_is_preimage,
    enumerate_preimages,
    is_admissible,
    path_count,
    preimage_prob_sum,
    windowed_evolve,
)

__version__ = "0.1.0"
