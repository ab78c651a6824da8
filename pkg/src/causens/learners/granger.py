"""Pairwise linear Granger causality."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from ..core import CausensError, StrengthMatrix, TimeSeriesDataset
from ..stats import (DegenerateTestWarning, SingularDesign, ZeroVariance, f_test_p,
                     ols, pearson)

log = logging.getLogger(__name__)


class SeriesTooShort(CausensError, ValueError):
    pass


@dataclass(frozen=True)
class GrangerPairResult:
    p_value: float
    best_lag: int
    strength: float
    degenerate: bool = False


def lag_matrix(x: np.ndarray, lags: int, start: int) -> np.ndarray:
    """Columns ``x[t-1], ..., x[t-lags]`` for rows ``t = start .. len(x)-1``."""
    T = len(x)
    return np.column_stack([x[start - l:T - l] for l in range(1, lags + 1)])


def _check_length(T: int, tau_max: int) -> None:
    if T <= 3 * tau_max + 2:
        raise SeriesTooShort(f"series of length {T} too short for tau_max={tau_max}")


def _restricted(y: np.ndarray, tau_max: int):
    target = y[tau_max:]
    ylags = lag_matrix(y, tau_max, tau_max)
    ones = np.ones((len(target), 1))
    fits = []
    for n in range(1, tau_max + 1):
        fits.append(ols(np.hstack([ones, ylags[:, :n]]), target).rss)
    return target, ones, ylags, fits


def _full_test(x, target, ones, ylags, rss_r, tau_max, p_threshold):
    xlags = lag_matrix(x, tau_max, tau_max)
    m = len(target)
    best = (2.0, 1, None)
    degenerate = False
    for n in range(1, tau_max + 1):
        design = np.hstack([ones, ylags[:, :n], xlags[:, :n]])
        fit = ols(design, target)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateTestWarning)
            p = f_test_p(rss_r[n - 1], fit.rss, n, m - 2 * n - 1)
        degenerate |= bool(caught)
        if p < best[0]:
            best = (p, n, fit)
    p, lag, fit = best
    if p >= p_threshold:
        return GrangerPairResult(p, lag, 0.0, degenerate)
    try:
        strength = abs(pearson(target - fit.residuals, target))
    except ZeroVariance:
        return GrangerPairResult(p, lag, 0.0, True)
    return GrangerPairResult(p, lag, strength, degenerate)


def granger_pair(x, y, tau_max: int, p_threshold: float = 0.05) -> GrangerPairResult:
    """Test whether the past of ``x`` improves the linear prediction of ``y``.

    Lags ``1..n`` are tested for every ``n`` up to ``tau_max``; the pair is
    causal when the smallest p-value is below ``p_threshold`` and the strength
    is the absolute correlation between fitted and observed ``y`` at that lag.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError("series must be aligned")
    _check_length(len(y), tau_max)
    if np.ptp(y) == 0 or np.ptp(x) == 0 or np.array_equal(x, y):
        # nothing to test: a constant series, or a source that is the target itself
        return GrangerPairResult(1.0, 1, 0.0, True)
    target, ones, ylags, rss_r = _restricted(y, tau_max)
    return _full_test(x, target, ones, ylags, rss_r, tau_max, p_threshold)


def granger_matrix(window: TimeSeriesDataset, cfg, seed=None) -> StrengthMatrix:
    X = window.values
    n = window.n
    _check_length(window.T, cfg.tau_max)
    out = np.zeros((n, n))
    for j in range(n):
        y = X[j]
        if np.ptp(y) == 0:
            continue
        try:
            target, ones, ylags, rss_r = _restricted(y, cfg.tau_max)
        except SingularDesign as exc:
            log.warning("granger: target %d skipped: %s", j, exc)
            continue
        for i in range(n):
            if i == j or np.ptp(X[i]) == 0:
                continue
            try:
                res = _full_test(X[i], target, ones, ylags, rss_r, cfg.tau_max,
                                 cfg.gc_p_threshold)
            except (SingularDesign, ArithmeticError) as exc:
                log.warning("granger: pair (%d, %d) skipped: %s", i, j, exc)
                continue
            out[i, j] = res.strength
    return StrengthMatrix.from_raw(out)
