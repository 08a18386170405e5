"""Finite-N random-matrix laboratory."""

from wpvol.matrixlab.ensembles import (
    EnsembleConfig,
    SampleBatch,
    sample,
    sample_gaussian,
    sample_potential_metropolis,
    sample_susy,
)
from wpvol.matrixlab.metropolis import ChainParams
from wpvol.matrixlab.stats import HistogramStats, histogram_and_stats

__all__ = [
    "ChainParams",
    "EnsembleConfig",
    "HistogramStats",
    "SampleBatch",
    "histogram_and_stats",
    "sample",
    "sample_gaussian",
    "sample_potential_metropolis",
    "sample_susy",
]
