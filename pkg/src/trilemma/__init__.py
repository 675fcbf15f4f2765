"""Decentralization, scalability and security metrics for proof-of-stake chains."""

__version__ = "0.1.0"

from .decentralization import (  # noqa: E402
    LayerSelector,
    WeightVector,
    aggregate_indices,
    gini_coefficient,
    hhi,
    layer_series,
    nakamoto_coefficient,
    normalize,
    rolling_index_series,
    shannon_entropy_index,
)
from .estimators import DecentralizationIndices, RollingIndex  # noqa: E402
from .ingest import (  # noqa: E402
    ChainDataset,
    ObservationSeries,
    align_series,
    load_chain_dataset,
    load_frame,
    validate_dataset,
    write_frame,
)
from .scalability import compare_scalability, latency_stats, throughput_stats  # noqa: E402
from .security import (  # noqa: E402
    AttackSimConfig,
    AttackSimResult,
    burned_fee_stats,
    fee_security_correlation,
    simulate_attack,
    sweep_attack,
)

__all__ = [
    "AttackSimConfig", "AttackSimResult", "ChainDataset", "DecentralizationIndices",
    "LayerSelector", "ObservationSeries", "RollingIndex", "WeightVector",
    "aggregate_indices", "align_series", "burned_fee_stats", "compare_scalability",
    "fee_security_correlation", "gini_coefficient", "hhi", "latency_stats",
    "layer_series", "load_chain_dataset", "load_frame", "nakamoto_coefficient",
    "normalize", "rolling_index_series", "shannon_entropy_index", "simulate_attack",
    "sweep_attack", "throughput_stats", "validate_dataset", "write_frame",
]
