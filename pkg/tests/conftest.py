import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from causens.core import EnsembleConfig, TimeSeriesDataset

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_cfg():
    return EnsembleConfig(partitions=3, partition_length=600, tau_max=3,
                          nte_max_queries=400, ccm_iterations=12, gmm_initializations=3)


def chain_dataset(T=3000, seed=0, coupling=0.8):
    """x -> y -> z with lag 1 and unit noise; w is independent noise."""
    r = np.random.default_rng(seed)
    e = r.standard_normal((4, T))
    x, y, z, w = e.copy()
    for t in range(1, T):
        y[t] = coupling * x[t - 1] + 0.3 * y[t - 1] + e[1, t]
        z[t] = coupling * y[t - 1] + 0.3 * z[t - 1] + e[2, t]
    return TimeSeriesDataset(("x", "y", "z", "w"), np.vstack([x, y, z, w]))


@pytest.fixture
def chain():
    return chain_dataset()


def coupled_logistic(T=3000, rx=3.8, ry=3.5, bxy=0.02, byx=0.1, x0=0.4, y0=0.2,
                     noise=0.0, seed=0):
    """Two-species logistic maps; ``byx`` is the push of x on y.

    ``noise`` adds Gaussian measurement error to both returned series; without
    it the maps are deterministic and conditional entropies are unbounded below.
    """
    x = np.empty(T)
    y = np.empty(T)
    x[0], y[0] = x0, y0
    for t in range(T - 1):
        x[t + 1] = x[t] * (rx - rx * x[t] - bxy * y[t])
        y[t + 1] = y[t] * (ry - ry * y[t] - byx * x[t])
    if noise:
        e = np.random.default_rng(seed).normal(0.0, noise, (2, T))
        return x + e[0], y + e[1]
    return x, y
