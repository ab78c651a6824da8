"""Rule-based merge of the fused learner matrices into one strength matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import CausensError, DimensionMismatch, StrengthMatrix, TrustMatrix


class AllTrustZero(CausensError, ValueError):
    pass


@dataclass(frozen=True)
class PairEvidence:
    strengths: tuple[float, ...]
    trusts: tuple[float, ...]

    @property
    def r(self) -> int:
        return sum(1 for s in self.strengths if s != 0)


def trust_floor_filter(me: StrengthMatrix, trust: TrustMatrix,
                       trust_floor: float = 1.0) -> StrengthMatrix:
    """Drop strengths whose trust is below ``trust_floor``."""
    if me.s.shape != trust.t.shape:
        raise DimensionMismatch("strength and trust matrices differ in shape")
    s = np.array(me.s)
    s[trust.t < trust_floor] = 0.0
    return StrengthMatrix(s)


def wcs(strengths, trusts) -> float:
    """Trust-weighted mean of the strengths.

    When every trust is zero but some strength is not, the nonzero strengths
    are averaged with equal weight.
    """
    s = np.asarray(strengths, dtype=float)
    t = np.asarray(trusts, dtype=float)
    total = t.sum()
    if total > 0:
        return float(np.clip((t / total) @ s, 0.0, 1.0))
    nz = s[s != 0]
    if nz.size == 0:
        raise AllTrustZero("no trust and no strength to weight")
    return float(nz.mean())


def combine_pair(ev: PairEvidence, alpha21: float = 10.0, alpha22: float = 2.0) -> float:
    """Merged strength of one pair.

    Fewer than two supporting learners give 0, three or more give the
    weighted strength, and exactly two need either one trust of at least
    ``alpha21`` or both trusts of at least ``alpha22``.
    """
    s = np.asarray(ev.strengths, dtype=float)
    # learners whose strength was filtered out do not vote with their trust
    t = np.where(s != 0, np.asarray(ev.trusts, dtype=float), 0.0)
    r = int(np.count_nonzero(s))
    if r <= 1:
        return 0.0
    if r == 2:
        ta, tb = t[s != 0]
        if not (max(ta, tb) >= alpha21 or min(ta, tb) >= alpha22):
            return 0.0
    return wcs(s, t)


def apply_rules(mes, trusts, alpha21: float = 10.0, alpha22: float = 2.0,
                trust_floor: float = 1.0) -> StrengthMatrix:
    """Trust-filter every learner's matrix and merge them pair by pair."""
    mes = list(mes)
    trusts = list(trusts)
    if len(mes) != len(trusts) or not mes:
        raise ValueError("need one trust matrix per strength matrix")
    n = mes[0].n
    if any(m.n != n for m in mes) or any(t.n != n for t in trusts):
        raise DimensionMismatch("all matrices must share the same shape")
    filtered = [trust_floor_filter(m, t, trust_floor) for m, t in zip(mes, trusts)]
    out = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            ev = PairEvidence(tuple(f.s[i, j] for f in filtered),
                              tuple(t.t[i, j] for t in trusts))
            out[i, j] = combine_pair(ev, alpha21, alpha22)
    return StrengthMatrix(out)
