"""Agreement-based credibility score and ground-truth confusion metrics."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

from .core import DimensionMismatch, StrengthMatrix

LEVELS = ((0.75, "strong"), (0.5, "medium"), (0.0, "weak"))


@dataclass(frozen=True)
class EvaluationReport:
    tp: int
    fn: int
    fp: int
    tn: int
    accuracy: float
    precision: float
    recall: float
    f1: float
    cs: float | None = None
    credibility_level: str | None = None
    degenerate_precision: bool = False

    def with_credibility(self, cs: float) -> "EvaluationReport":
        return replace(self, cs=cs, credibility_level=credibility_level(cs))

    def to_dict(self) -> dict:
        return asdict(self)


def credibility_score(mre_bar: StrengthMatrix, mes) -> float:
    """Agreement between the final matrix and the fused learner matrices.

    Each pair scores the fraction of learners that agree with the final
    verdict (zero or nonzero); the pair average, mapped from [0.5, 1] onto
    [0, 1], is the score. Values are clamped to [0, 1] because pruning can
    leave pairs on which a minority of learners agrees.
    """
    mes = list(mes)
    n = mre_bar.n
    if any(m.n != n for m in mes):
        raise DimensionMismatch("learner matrices must match the final matrix")
    K = len(mes)
    zeros = np.sum([m.s == 0 for m in mes], axis=0)
    per_pair = np.where(mre_bar.s == 0, zeros / K, (K - zeros) / K)
    off = ~np.eye(n, dtype=bool)
    cs = (per_pair[off].mean() - 0.5) * 2
    return float(np.clip(cs, 0.0, 1.0))


def credibility_level(cs: float) -> str:
    for bound, name in LEVELS:
        if cs >= bound:
            return name
    return "weak"


def confusion_metrics(pred: StrengthMatrix, truth) -> EvaluationReport:
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != pred.s.shape:
        raise DimensionMismatch(f"truth shape {truth.shape} != prediction {pred.s.shape}")
    off = ~np.eye(pred.n, dtype=bool)
    p = (pred.s > 0)[off]
    t = truth[off]
    tp = int(np.sum(p & t))
    fp = int(np.sum(p & ~t))
    fn = int(np.sum(~p & t))
    tn = int(np.sum(~p & ~t))
    total = tp + fp + fn + tn
    degenerate = tp + fp == 0
    precision = 0.0 if degenerate else tp / (tp + fp)
    recall = tp / (tp + fn) if tp + fn else 1.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvaluationReport(tp, fn, fp, tn, (tp + tn) / total, precision, recall, f1,
                            degenerate_precision=degenerate)
