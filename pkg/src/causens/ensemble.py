"""Fusion of one learner's per-window strength matrices into a single matrix.

Every ordered pair contributes a K-vector of window strengths. A two-component
Gaussian mixture separates pairs that are consistently strong from the rest;
the strong group keeps the median of its nonzero strengths together with a
trust score that rewards consistent, frequent detections.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (CausensError, DimensionMismatch, EnsembleConfig, StrengthMatrix,
                   TrustMatrix, offdiag_pairs)
from .stats import DegenerateData, gmm_fit_2

log = logging.getLogger(__name__)


class AllZero(CausensError, ValueError):
    pass


class DegenerateClustering(UserWarning):
    pass


@dataclass(frozen=True)
class StackedStrengths:
    """One row per ordered pair ``(i, j)``, ``i != j``; one column per window."""

    rows: np.ndarray
    pairs: tuple[tuple[int, int], ...]
    n: int

    @property
    def K(self) -> int:
        return self.rows.shape[1]


def floor_filter(m: StrengthMatrix, floor: float = 0.3) -> StrengthMatrix:
    """Zero every strength at or below ``floor``."""
    s = np.array(m.s)
    s[s <= floor] = 0.0
    return StrengthMatrix(s)


def stack(matrices) -> StackedStrengths:
    mats = [m.s if isinstance(m, StrengthMatrix) else np.asarray(m) for m in matrices]
    if len(mats) < 2:
        raise ValueError("need at least two matrices to stack")
    n = mats[0].shape[0]
    if any(m.shape != (n, n) for m in mats):
        raise DimensionMismatch("all matrices must share the same shape")
    pairs = tuple(offdiag_pairs(n))
    idx = tuple(np.array(pairs).T)
    rows = np.column_stack([m[idx] for m in mats])
    return StackedStrengths(rows, pairs, n)


def unstack(stacked: StackedStrengths) -> list[StrengthMatrix]:
    out = []
    idx = tuple(np.array(stacked.pairs).T)
    for k in range(stacked.K):
        m = np.zeros((stacked.n, stacked.n))
        m[idx] = stacked.rows[:, k]
        out.append(StrengthMatrix(m))
    return out


def median_plus(v) -> float:
    """Median of the nonzero entries."""
    v = np.asarray(v, dtype=float)
    nz = v[v != 0]
    if nz.size == 0:
        raise AllZero("median of nonzero values needs a nonzero entry")
    return float(np.median(nz))


def trust_score(v, delta: float = 1e-20, cap: float = 1e6) -> float:
    """Consistency of the nonzero entries: ``mean * m / ((std + delta) * K)``, capped.

    ``m`` counts the nonzero entries, ``K`` all entries, and ``std`` is the
    population standard deviation of the nonzero entries.
    """
    v = np.asarray(v, dtype=float)
    nz = v[v != 0]
    if nz.size == 0:
        raise AllZero("trust needs a nonzero entry")
    h = nz.mean() * nz.size / ((nz.std() + delta) * v.size)
    return float(min(h, cap))


def _strong_rows(rows: np.ndarray, cfg: EnsembleConfig) -> np.ndarray:
    """Boolean mask of rows in the high-mean mixture component."""
    nonzero = rows.any(axis=1)
    try:
        fit = gmm_fit_2(rows, cfg.gmm_initializations, cfg.gmm_max_em_iters,
                        cfg.gmm_covariance_regularizer, seed=cfg.rng_seed)
    except DegenerateData as exc:
        if len(rows) >= 4:
            warnings.warn(f"mixture fit degenerate ({exc}); every pair set to the "
                          "non-causal group", DegenerateClustering)
            return np.zeros(len(rows), dtype=bool)
        warnings.warn(f"too few pairs for a mixture fit ({exc}); nonzero pairs kept",
                      DegenerateClustering)
        return nonzero
    strong = int(np.argmax(fit.means.mean(axis=1)))
    return (fit.assignment == strong) & nonzero


def gmm_ensemble(matrices, cfg: EnsembleConfig | None = None
                 ) -> tuple[StrengthMatrix, TrustMatrix]:
    """Fuse K window matrices of one learner into strengths and trust scores."""
    cfg = cfg or EnsembleConfig()
    mats = [floor_filter(m, cfg.strength_floor) for m in matrices]
    st = stack(mats)
    n = st.n
    me = np.zeros((n, n))
    trust = np.zeros((n, n))
    if not st.rows.any():
        return StrengthMatrix(me), TrustMatrix(trust)
    strong = _strong_rows(st.rows, cfg)
    for row, (i, j), keep in zip(st.rows, st.pairs, strong):
        if not keep:
            continue
        if np.count_nonzero(row) < 2:
            # a single-window detection carries no consistency evidence
            continue
        me[i, j] = median_plus(row)
        trust[i, j] = trust_score(row, cfg.delta, cfg.trust_cap)
    return StrengthMatrix(me), TrustMatrix(trust)
