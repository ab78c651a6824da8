import numpy as np
import pytest

from causens.core import EnsembleConfig, TimeSeriesDataset
from causens.learners.granger import SeriesTooShort, granger_matrix, granger_pair, lag_matrix


def linear_pair(T=3000, seed=0):
    """y_t = 1.34 x_{t-2} - 0.5 y_{t-4} + noise with x exogenous."""
    r = np.random.default_rng(seed)
    x = r.uniform(0, 2, T)
    e = r.standard_normal(T)
    y = np.zeros(T)
    for t in range(4, T):
        y[t] = 1.34 * x[t - 2] - 0.5 * y[t - 4] + e[t]
    return x, y


def test_lag_matrix_layout():
    m = lag_matrix(np.arange(6.0), 2, 2)
    np.testing.assert_array_equal(m, [[1, 0], [2, 1], [3, 2], [4, 3]])


def test_detects_lagged_driver():
    x, y = linear_pair()
    res = granger_pair(x, y, tau_max=4)
    assert res.p_value < 1e-10
    assert res.strength > 0.5
    assert res.best_lag >= 2


def test_independent_noise_is_not_causal(rng):
    hits = 0
    for _ in range(20):
        x, y = rng.standard_normal((2, 1000))
        hits += granger_pair(x, y, tau_max=4).strength > 0
    # four lags tested at 5% each; well under half should trigger
    assert hits <= 6


def test_strength_zero_iff_not_significant():
    x, y = linear_pair(600, seed=3)
    for a, b in ((x, y), (y, x)):
        res = granger_pair(a, b, 4, p_threshold=0.05)
        assert (res.strength == 0) == (res.p_value >= 0.05)
        assert 0 <= res.strength <= 1


def test_identical_series_flagged():
    x, _ = linear_pair(300)
    res = granger_pair(x, x.copy(), 4)
    assert res.strength == 0 and res.degenerate


def test_too_short():
    with pytest.raises(SeriesTooShort):
        granger_pair(np.arange(14.0), np.arange(14.0), 4)


def test_asymmetry_over_seeds():
    forward = reverse = 0
    for seed in range(20):
        x, y = linear_pair(1500, seed)
        forward += granger_pair(x, y, 4).strength > 0
        reverse += granger_pair(y, x, 4).strength > 0
    assert forward == 20
    # the smallest of four per-lag p-values is significant at most 4 * 5% of the time
    assert reverse <= 4


def test_matrix_orientation_and_constant_input():
    x, y = linear_pair(1500)
    cfg = EnsembleConfig(tau_max=4)
    m = granger_matrix(TimeSeriesDataset(("x", "y"), np.vstack([x, y])), cfg).s
    assert m[0, 1] > 0.5 and m[1, 0] == 0
    const = TimeSeriesDataset(("a", "b", "c"), np.ones((3, 200)))
    assert not granger_matrix(const, cfg).s.any()
