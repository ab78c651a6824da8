import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causens.core import TimeSeriesDataset
from causens.partition import InvalidPlan, plan_partitions, slice_dataset


def test_benchmark_plan():
    plan = plan_partitions(20_000, 10, 3000)
    # (20000 - 3000) / 9 = 1888.9 apart
    assert plan.starts == (0, 1889, 3778, 5667, 7556, 9444, 11333, 13222, 15111, 17000)
    assert plan.K == 10


def test_half_rounds_up():
    # span 5 over 2 gaps -> 2.5 -> 3
    assert plan_partitions(10, 3, 5).starts == (0, 3, 5)


def test_invalid():
    with pytest.raises(InvalidPlan):
        plan_partitions(100, 1, 10)
    with pytest.raises(InvalidPlan):
        plan_partitions(100, 3, 101)


def test_slices_are_views_of_the_series():
    d = TimeSeriesDataset(("a", "b"), np.arange(40.0).reshape(2, 20))
    windows = slice_dataset(d, plan_partitions(20, 3, 8))
    assert [w.values[0, 0] for w in windows] == [0, 6, 12]
    assert all(w.T == 8 for w in windows)


@given(st.integers(2, 5000), st.integers(2, 40), st.data())
def test_plan_properties(T, K, data):
    L = data.draw(st.integers(1, T))
    plan = plan_partitions(T, K, L)
    assert plan.starts[0] == 0
    assert plan.starts[-1] == T - L
    assert list(plan.starts) == sorted(plan.starts)
    gaps = np.diff(plan.starts)
    assert gaps.max() - gaps.min() <= 1
