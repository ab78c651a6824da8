"""Convergent cross mapping.

A link ``X -> Y`` is declared when estimates of ``Y`` read off the shadow
manifold of ``X`` improve with library size and then settle.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..core import StrengthMatrix, TimeSeriesDataset
from .granger import SeriesTooShort

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ShadowManifold:
    """Delay vectors ``[x(t), x(t - lag), ..., x(t - (E - 1) lag)]``.

    Row ``r`` of ``points`` belongs to time ``times[r]``.
    """

    points: np.ndarray
    times: np.ndarray
    E: int
    lag: int

    @classmethod
    def embed(cls, x, E: int, lag: int = 1) -> "ShadowManifold":
        x = np.asarray(x, dtype=float)
        if E < 1 or lag < 1:
            raise ValueError("embedding dimension and lag must be positive")
        first = (E - 1) * lag
        if len(x) <= first:
            raise SeriesTooShort(f"series of length {len(x)} too short to embed with E={E}")
        T = len(x)
        pts = np.column_stack([x[first - m * lag:T - m * lag] for m in range(E)])
        return cls(pts, np.arange(first, T), E, lag)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class CcmPairResult:
    correlations: np.ndarray
    converged: bool
    strength: float


def cross_map_weights(distances: np.ndarray) -> np.ndarray:
    """Neighbour weights ``exp(-d_k / d_1)``, normalised per row.

    ``distances`` is sorted ascending along the last axis. Rows whose nearest
    distance is zero give equal weight to their zero-distance neighbours.
    """
    d = np.atleast_2d(np.asarray(distances, dtype=float))
    d1 = d[:, :1]
    zero = d1[:, 0] == 0
    u = np.empty_like(d)
    ok = ~zero
    with np.errstate(over="ignore"):
        u[ok] = np.exp(-d[ok] / d1[ok])
    u[zero] = (d[zero] == 0).astype(float)
    return u / u.sum(axis=1, keepdims=True)


def cross_map_estimate(manifold: ShadowManifold, target, query_rows,
                       library_rows=None) -> np.ndarray:
    """Estimate ``target`` at the times of ``query_rows`` from manifold neighbours.

    Neighbours are the ``E + 1`` nearest library points in Euclidean distance;
    the library defaults to every manifold point other than the query itself.
    """
    target = np.asarray(target, dtype=float)
    query_rows = np.asarray(query_rows)
    k = manifold.E + 1
    if library_rows is None:
        tree = cKDTree(manifold.points)
        d, idx = tree.query(manifold.points[query_rows], k=k + 1)
        keep = idx != query_rows[:, None]
        # drop the query itself (or the farthest neighbour when the query is a duplicate)
        d = np.array([row[m][:k] for row, m in zip(d, keep)])
        idx = np.array([row[m][:k] for row, m in zip(idx, keep)])
        lib_times = manifold.times
    else:
        library_rows = np.asarray(library_rows)
        tree = cKDTree(manifold.points[library_rows])
        d, idx = tree.query(manifold.points[query_rows], k=k)
        lib_times = manifold.times[library_rows]
    w = cross_map_weights(d)
    return (w * target[lib_times[idx]]).sum(axis=1)


def _correlations(est: np.ndarray, truth: np.ndarray) -> np.ndarray:
    """Pearson correlation of each row of ``est`` with the matching row of ``truth``."""
    e = est - est.mean(axis=-1, keepdims=True)
    t = truth - truth.mean(axis=-1, keepdims=True)
    den = np.sqrt((e * e).sum(axis=-1) * (t * t).sum(axis=-1))
    num = (e * t).sum(axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(den > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return r


def library_sizes(n_points: int, E: int, iterations: int, train_fraction: float) -> np.ndarray:
    lo = 10 * (E + 1)
    hi = int(train_fraction * n_points)
    if hi < lo or iterations < 1:
        raise SeriesTooShort(f"{n_points} manifold points leave no room for a library schedule")
    return np.unique(np.linspace(lo, hi, iterations).astype(int))


def is_converged(correlations, window: int, threshold: float) -> bool:
    """Stable tail (spread below ``threshold``) that ends above its start."""
    c = np.asarray(correlations, dtype=float)
    if len(c) < max(window, 2):
        return False
    tail = c[-window:]
    return bool(np.ptp(tail) < threshold and c[-1] > c[0])


def _cross_map_curves(manifold: ShadowManifold, targets: np.ndarray, cfg,
                      rng: np.random.Generator) -> np.ndarray:
    """Correlation curves (targets x library sizes) for one source manifold."""
    n = len(manifold)
    sizes = library_sizes(n, manifold.E, cfg.ccm_iterations, cfg.ccm_train_fraction)
    n_query = max(1, int(round(n * (1 - cfg.ccm_train_fraction))))
    k = manifold.E + 1
    curves = np.zeros((len(targets), len(sizes)))
    for c, size in enumerate(sizes):
        perm = rng.permutation(n)
        lib = perm[:size]
        rest = perm[size:]
        q = rest if len(rest) <= n_query else rng.choice(rest, n_query, replace=False)
        d, idx = cKDTree(manifold.points[lib]).query(manifold.points[q], k=k)
        w = cross_map_weights(d)
        lib_t = manifold.times[lib][idx]
        q_t = manifold.times[q]
        est = (w[None] * targets[:, lib_t]).sum(axis=2)
        curves[:, c] = _correlations(est, targets[:, q_t])
    return curves


def ccm_pair(x, y, cfg, seed: int = 0) -> CcmPairResult:
    """Cross-map ``y`` from the shadow manifold of ``x`` over growing libraries."""
    man = ShadowManifold.embed(x, cfg.ccm_embedding_dim, cfg.ccm_embedding_lag)
    y = np.asarray(y, dtype=float)
    if len(y) != len(x):
        raise ValueError("series must be aligned")
    rng = np.random.default_rng(seed)
    curve = _cross_map_curves(man, y[None], cfg, rng)[0]
    conv = is_converged(curve, cfg.ccm_convergence_window, cfg.ccm_convergence_threshold)
    return CcmPairResult(curve, conv, float(min(abs(curve[-1]), 1.0)) if conv else 0.0)


def ccm_matrix(window: TimeSeriesDataset, cfg, seed=None) -> StrengthMatrix:
    """Entry ``(i, j)`` is the converged cross-map skill of ``X_j`` from ``M_{X_i}``."""
    n = window.n
    X = window.values
    seq = np.random.SeedSequence(0 if seed is None else seed)
    out = np.zeros((n, n))
    for i, sub in zip(range(n), seq.spawn(n)):
        if np.ptp(X[i]) == 0:
            continue
        others = [j for j in range(n) if j != i and np.ptp(X[j]) > 0]
        if not others:
            continue
        man = ShadowManifold.embed(X[i], cfg.ccm_embedding_dim, cfg.ccm_embedding_lag)
        curves = _cross_map_curves(man, X[others], cfg, np.random.default_rng(sub))
        for j, curve in zip(others, curves):
            if is_converged(curve, cfg.ccm_convergence_window, cfg.ccm_convergence_threshold):
                out[i, j] = abs(curve[-1])
    return StrengthMatrix.from_raw(out)
