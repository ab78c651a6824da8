"""Lagged PCMCI: PC1 condition selection followed by MCI partial-correlation tests.

Only lagged links (``tau >= 1``) are considered; contemporaneous orientation
is not part of this learner.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..core import StrengthMatrix, TimeSeriesDataset
from ..stats import t_test_two_sided
from .granger import SeriesTooShort

log = logging.getLogger(__name__)

Link = tuple[int, int]  # (variable, lag)


@dataclass(frozen=True)
class ParentSet:
    """Estimated lagged parents of every variable, strongest first."""

    parents: dict[int, list[Link]]
    strengths: dict[int, dict[Link, float]] = field(default_factory=dict)

    def __getitem__(self, i: int) -> list[Link]:
        return self.parents[i]


class _LaggedData:
    """Lagged views of a window.

    ``col((j, tau))`` is ``X^j_{t-tau}`` for ``t = 2 tau_max .. T-1``; the
    doubled offset leaves room for source parents shifted by ``tau``.
    """

    def __init__(self, values: np.ndarray, tau_max: int):
        self.values = values
        self.offset = 2 * tau_max
        self.T = values.shape[1]
        self.N = self.T - self.offset
        # standardise once so residual computations are well conditioned
        mu = values.mean(axis=1, keepdims=True)
        sd = values.std(axis=1, keepdims=True)
        sd[sd == 0] = 1.0
        self.z = (values - mu) / sd

    def col(self, link: Link) -> np.ndarray:
        j, tau = link
        return self.z[j, self.offset - tau:self.T - tau]

    def design(self, links) -> np.ndarray:
        if not links:
            return np.ones((self.N, 1))
        return np.column_stack([np.ones(self.N)] + [self.col(l) for l in links])


def _residual(y: np.ndarray, Z: np.ndarray) -> np.ndarray:
    beta, *_ = np.linalg.lstsq(Z, y, rcond=None)
    return y - Z @ beta


def partial_corr_test(x: np.ndarray, y: np.ndarray, Z: np.ndarray) -> tuple[float, float]:
    """Partial correlation of ``x`` and ``y`` given the columns of ``Z`` and its p-value.

    ``Z`` must contain an intercept column.
    """
    rx = _residual(x, Z)
    ry = _residual(y, Z)
    sxx = rx @ rx
    syy = ry @ ry
    if sxx <= 1e-12 * len(x) or syy <= 1e-12 * len(y):
        return 0.0, 1.0
    r = float(np.clip((rx @ ry) / np.sqrt(sxx * syy), -1.0, 1.0))
    df = len(x) - 2 - (Z.shape[1] - 1)
    return r, t_test_two_sided(r, df)


def _check(window: TimeSeriesDataset, tau_max: int) -> None:
    if window.T <= 10 * tau_max:
        raise SeriesTooShort(
            f"window of length {window.T} too short for tau_max={tau_max}")


def pc_condition_selection(window: TimeSeriesDataset, tau_max: int,
                           p_threshold: float = 0.05, max_conds: int = 3,
                           _data: _LaggedData | None = None) -> ParentSet:
    """Iteratively prune candidate parents of every variable (PC1 variant).

    In round ``q`` each remaining candidate is tested against the target
    conditioned on the ``q`` strongest other candidates; insignificant ones
    are dropped and the survivors re-ranked by their weakest association.
    """
    _check(window, tau_max)
    data = _data or _LaggedData(window.values, tau_max)
    parents: dict[int, list[Link]] = {}
    strengths: dict[int, dict[Link, float]] = {}
    for i in range(window.n):
        y = data.col((i, 0))
        if np.ptp(y) == 0:
            parents[i], strengths[i] = [], {}
            continue
        cands = [(j, tau) for tau in range(1, tau_max + 1) for j in range(window.n)]
        cands = [c for c in cands if np.ptp(data.col(c)) > 0]
        score = {c: np.inf for c in cands}
        for q in range(max_conds + 1):
            if len(cands) - 1 < q:
                break
            keep = []
            for c in cands:
                conds = [o for o in cands if o != c][:q]
                r, p = partial_corr_test(data.col(c), y, data.design(conds))
                score[c] = min(score[c], abs(r))
                if p <= p_threshold:
                    keep.append(c)
            cands = sorted(keep, key=lambda c: (-score[c], c[1], c[0]))
        parents[i] = cands
        strengths[i] = {c: score[c] for c in cands}
    return ParentSet(parents, strengths)


def mci_test(window: TimeSeriesDataset, parents: ParentSet, tau_max: int,
             p_threshold: float = 0.05, max_conds: int = 3,
             _data: _LaggedData | None = None) -> StrengthMatrix:
    """Momentary conditional independence tests for every lagged pair.

    The test of ``X^j_{t-tau} -> X^i_t`` conditions on the strongest parents
    of ``X^i_t`` (excluding the tested link) and on the strongest parents of
    ``X^j``, shifted back by ``tau``. Entry ``(j, i)`` is the largest
    significant absolute partial correlation over ``tau``.
    """
    _check(window, tau_max)
    data = _data or _LaggedData(window.values, tau_max)
    n = window.n
    out = np.zeros((n, n))
    for i in range(n):
        y = data.col((i, 0))
        if np.ptp(y) == 0:
            continue
        for j in range(n):
            if j == i:
                continue
            for tau in range(1, tau_max + 1):
                link = (j, tau)
                x = data.col(link)
                if np.ptp(x) == 0:
                    continue
                conds_y = [c for c in parents[i] if c != link][:max_conds]
                conds_x = []
                for k, lag in parents[j]:
                    shifted = (k, lag + tau)
                    if shifted in conds_y or shifted == link:
                        continue
                    conds_x.append(shifted)
                    if len(conds_x) == max_conds:
                        break
                r, p = partial_corr_test(x, y, data.design(conds_y + conds_x))
                if p <= p_threshold:
                    out[j, i] = max(out[j, i], abs(r))
    return StrengthMatrix.from_raw(out)


def pcmci_matrix(window: TimeSeriesDataset, cfg, seed=None) -> StrengthMatrix:
    data = _LaggedData(window.values, cfg.tau_max)
    parents = pc_condition_selection(window, cfg.tau_max, cfg.pcmci_p_threshold,
                                     cfg.pcmci_max_conds, _data=data)
    return mci_test(window, parents, cfg.tau_max, cfg.pcmci_p_threshold,
                    cfg.pcmci_max_conds, _data=data)
