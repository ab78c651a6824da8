"""Normalized transfer entropy with the Kraskov nearest-neighbour estimator.

All estimators work on z-scored series and use the maximum norm. Neighbour
counts are taken strictly inside the distance to the k-th joint neighbour.
"""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ..core import CausensError, StrengthMatrix, TimeSeriesDataset
from ..stats import digamma
from .granger import SeriesTooShort

log = logging.getLogger(__name__)

JITTER = 1e-10


class DuplicateExplosion(CausensError, ValueError):
    pass


class DenomNonPositive(UserWarning):
    pass


@dataclass(frozen=True)
class TePairResult:
    te_raw: float
    te_shuffled_mean: float
    denom: float
    nte: float
    best_lag: int = 1


def standardize(v: np.ndarray, rng: np.random.Generator | None = None) -> np.ndarray:
    """Z-score a series and break exact ties with a tiny uniform jitter.

    Raises DuplicateExplosion when more than half the values repeat exactly.
    """
    v = np.asarray(v, dtype=float)
    sd = v.std()
    if sd == 0:
        return np.zeros_like(v)
    z = (v - v.mean()) / sd
    if len(np.unique(z)) < 0.5 * len(z):
        raise DuplicateExplosion(
            f"{len(z) - len(np.unique(z))} of {len(z)} values are exact duplicates")
    rng = rng or np.random.default_rng(0)
    return z + JITTER * np.ptp(z) * rng.uniform(-0.5, 0.5, len(z))


def _as_2d(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    return a[:, None] if a.ndim == 1 else a


def _count_within(points: np.ndarray, queries: np.ndarray, radius: np.ndarray,
                  tree: cKDTree | None = None) -> np.ndarray:
    # counts include the query point itself, i.e. n_i + 1
    if points.shape[1] == 1:
        ordered = np.sort(points[:, 0])
        v = queries[:, 0]
        return (np.searchsorted(ordered, v + radius, side="right")
                - np.searchsorted(ordered, v - radius, side="left"))
    tree = tree if tree is not None else cKDTree(points)
    return tree.query_ball_point(queries, radius, p=np.inf, return_length=True)


def _kth_radius(points: np.ndarray, q: np.ndarray, k: int) -> np.ndarray:
    d, _ = cKDTree(points).query(points[q], k=k + 1, p=np.inf)
    return np.nextafter(d[:, -1], 0)


def ksg_mi(x, y, k: int = 6, queries: np.ndarray | None = None) -> float:
    """Mutual information I(x; y) in nats (first Kraskov estimator)."""
    x, y = _as_2d(x), _as_2d(y)
    N = len(x)
    if N <= k + 1:
        raise SeriesTooShort(f"need more than {k + 1} samples, got {N}")
    q = np.arange(N) if queries is None else np.asarray(queries)
    r = _kth_radius(np.hstack([x, y]), q, k)
    nx = _count_within(x, x[q], r)
    ny = _count_within(y, y[q], r)
    return float(digamma(k) + digamma(N) - np.mean(digamma(nx) + digamma(ny)))


class _ConditionSpace:
    """Cached trees over the target and its past, reused across sources."""

    def __init__(self, target: np.ndarray, past: np.ndarray):
        self.target = _as_2d(target)
        self.past = _as_2d(past)
        self.yz = np.hstack([self.target, self.past])
        self.yz_tree = cKDTree(self.yz)
        self.z_tree = cKDTree(self.past)

    def cmi(self, source: np.ndarray, q: np.ndarray, k: int) -> float:
        x = _as_2d(source)
        r = _kth_radius(np.hstack([x, self.yz]), q, k)
        xz = np.hstack([x, self.past])
        n_xz = _count_within(xz, xz[q], r)
        n_yz = _count_within(self.yz, self.yz[q], r, self.yz_tree)
        n_z = _count_within(self.past, self.past[q], r, self.z_tree)
        return float(digamma(k) - np.mean(digamma(n_xz) + digamma(n_yz) - digamma(n_z)))


def ksg_cmi(x, y, z, k: int = 6, queries: np.ndarray | None = None) -> float:
    """Conditional mutual information I(x; y | z) in nats."""
    y = _as_2d(y)
    if len(y) <= k + 1:
        raise SeriesTooShort(f"need more than {k + 1} samples, got {len(y)}")
    q = np.arange(len(y)) if queries is None else np.asarray(queries)
    return _ConditionSpace(y, z).cmi(x, q, k)


def kl_entropy(points, k: int = 6, queries: np.ndarray | None = None) -> float:
    """Kozachenko-Leonenko differential entropy in nats (maximum norm)."""
    p = _as_2d(points)
    N, d = p.shape
    q = np.arange(N) if queries is None else np.asarray(queries)
    dist, _ = cKDTree(p).query(p[q], k=k + 1, p=np.inf)
    eps = np.maximum(dist[:, -1], np.finfo(float).tiny)
    return float(digamma(N) - digamma(k) + d * np.mean(np.log(2 * eps)))


def _lagged(v: np.ndarray, lags, start: int) -> np.ndarray:
    T = len(v)
    return np.column_stack([v[start - l:T - l] for l in lags])


def _queries(N: int, max_queries: int | None, rng: np.random.Generator) -> np.ndarray:
    if max_queries is None or N <= max_queries:
        return np.arange(N)
    return np.sort(rng.choice(N, max_queries, replace=False))


def te_ksg(x, y, tau_max: int, k: int = 6, lags=None, history: int | None = None,
           max_queries: int | None = None, seed: int = 0) -> float:
    """Transfer entropy from ``x`` to ``y``.

    Estimates ``I(y_t; x_{t-l}, l in lags | y_{t-1}, ..., y_{t-history})``.
    By default both pasts span lags ``1..tau_max``.
    """
    lags = tuple(range(1, tau_max + 1)) if lags is None else tuple(lags)
    history = tau_max if history is None else history
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) <= tau_max + k + 2:
        raise SeriesTooShort(f"series of length {len(y)} too short for tau_max={tau_max}")
    rng = np.random.default_rng(seed)
    xs, ys = standardize(x, rng), standardize(y, rng)
    start = max(max(lags), history)
    space = _ConditionSpace(ys[start:], _lagged(ys, range(1, history + 1), start))
    q = _queries(len(ys) - start, max_queries, rng)
    return space.cmi(_lagged(xs, lags, start), q, k)


class _TargetTE:
    """Everything about one target series that NTE needs, computed once."""

    def __init__(self, y: np.ndarray, tau_max: int, history: int, k: int,
                 max_queries: int | None, rng: np.random.Generator):
        self.start = max(tau_max, history)
        self.k = k
        self.tau_max = tau_max
        target = y[self.start:]
        past = _lagged(y, range(1, history + 1), self.start)
        self.space = _ConditionSpace(target, past)
        self.q = _queries(len(target), max_queries, rng)
        self.denom = (kl_entropy(np.column_stack([target, past]), k, self.q)
                      - kl_entropy(past, k, self.q))

    def te_at(self, xs: np.ndarray, lag: int) -> float:
        return self.space.cmi(_lagged(xs, (lag,), self.start), self.q, self.k)

    def pair(self, xs: np.ndarray, shuffles: int, rng: np.random.Generator) -> TePairResult:
        per_lag = [self.te_at(xs, lag) for lag in range(1, self.tau_max + 1)]
        best = int(np.argmax(per_lag))
        te_raw = per_lag[best]
        null = [self.te_at(rng.permutation(xs), best + 1) for _ in range(shuffles)]
        te_null = float(np.mean(null)) if null else 0.0
        if not self.denom > 0:
            warnings.warn(f"conditional entropy {self.denom:.4g} is not positive",
                          DenomNonPositive)
            return TePairResult(te_raw, te_null, self.denom, 0.0, best + 1)
        nte = float(np.clip((te_raw - te_null) / self.denom, 0.0, 1.0))
        return TePairResult(te_raw, te_null, self.denom, nte, best + 1)


def nte_pair(x, y, cfg, seed: int = 0) -> TePairResult:
    """Shuffle-corrected transfer entropy from ``x`` to ``y``, scaled to [0, 1].

    The raw value is the largest single-lag transfer entropy over lags
    ``1..tau_max``, conditioned on ``cfg.nte_history`` target lags. The
    correction subtracts the mean over ``cfg.nte_shuffles`` permutations of
    ``x`` at that lag; the scale is the conditional entropy of the target
    given the same history.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) <= cfg.tau_max + cfg.nte_k_neighbors + 2:
        raise SeriesTooShort(f"series of length {len(y)} too short for tau_max={cfg.tau_max}")
    rng = np.random.default_rng(seed)
    ys = standardize(y, rng)
    xs = standardize(x, rng)
    if np.ptp(ys) == 0 or np.ptp(xs) == 0:
        return TePairResult(0.0, 0.0, 0.0, 0.0)
    target = _TargetTE(ys, cfg.tau_max, cfg.nte_history, cfg.nte_k_neighbors,
                       cfg.nte_max_queries, rng)
    return target.pair(xs, cfg.nte_shuffles, rng)


def nte_matrix(window: TimeSeriesDataset, cfg, seed=None) -> StrengthMatrix:
    n = window.n
    if window.T <= cfg.tau_max + cfg.nte_k_neighbors + 2:
        raise SeriesTooShort(f"window of length {window.T} too short")
    seq = np.random.SeedSequence(0 if seed is None else seed)
    rng = np.random.default_rng(seq)
    z = []
    for v in window.values:
        try:
            z.append(standardize(v, rng))
        except DuplicateExplosion as exc:
            log.warning("nte: series skipped: %s", exc)
            z.append(np.zeros_like(v))
    out = np.zeros((n, n))
    for j, pair_seq in zip(range(n), seq.spawn(n)):
        if np.ptp(z[j]) == 0:
            continue
        pair_rng = np.random.default_rng(pair_seq)
        target = _TargetTE(z[j], cfg.tau_max, cfg.nte_history, cfg.nte_k_neighbors,
                           cfg.nte_max_queries, pair_rng)
        for i in range(n):
            if i == j or np.ptp(z[i]) == 0:
                continue
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", DenomNonPositive)
                out[i, j] = target.pair(z[i], cfg.nte_shuffles, pair_rng).nte
        if not target.denom > 0:
            log.warning("nte: target %d has non-positive conditional entropy", j)
    return StrengthMatrix.from_raw(out)
