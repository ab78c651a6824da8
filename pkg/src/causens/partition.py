"""Overlapping, evenly spaced windows over a time series."""
from __future__ import annotations

from dataclasses import dataclass

from .core import CausensError, TimeSeriesDataset


class InvalidPlan(CausensError, ValueError):
    pass


@dataclass(frozen=True)
class PartitionPlan:
    starts: tuple[int, ...]
    length: int

    @property
    def K(self) -> int:
        return len(self.starts)

    def ranges(self) -> list[range]:
        return [range(s, s + self.length) for s in self.starts]


def plan_partitions(T: int, K: int, L: int) -> PartitionPlan:
    """K windows of length L whose starts are spread evenly over [0, T - L].

    ``starts[i] = round(i * (T - L) / (K - 1))``, halves rounded up.
    """
    if K < 2:
        raise InvalidPlan(f"need at least 2 partitions, got {K}")
    if L < 1 or L > T:
        raise InvalidPlan(f"partition length {L} must lie in [1, {T}]")
    span = T - L
    # integer arithmetic: floor((2 i span + (K - 1)) / (2 (K - 1)))
    starts = tuple((2 * i * span + (K - 1)) // (2 * (K - 1)) for i in range(K))
    return PartitionPlan(starts, L)


def slice_dataset(d: TimeSeriesDataset, plan: PartitionPlan) -> list[TimeSeriesDataset]:
    if plan.starts[-1] + plan.length > d.T:
        raise InvalidPlan(f"plan reaches column {plan.starts[-1] + plan.length} "
                          f"but the dataset has {d.T}")
    return [d.window(s, plan.length) for s in plan.starts]
