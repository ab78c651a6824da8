"""Multi-split causal ensemble for multivariate time series.

Four base learners run on overlapping windows; their per-window strength
matrices are fused by a Gaussian mixture per learner, merged by trust-aware
rules, and pruned of indirect links.
"""
from .core import (CausalGraph, EnsembleConfig, StrengthMatrix, TimeSeriesDataset,
                   TrustMatrix)
from .pipeline import PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = ["CausalGraph", "EnsembleConfig", "PipelineResult", "StrengthMatrix",
           "TimeSeriesDataset", "TrustMatrix", "run_pipeline", "__version__"]
