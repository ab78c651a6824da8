"""Benchmark generators with known ground-truth adjacency.

Three systems: a linear 5-variable chain, a nonlinear 5-variable system and a
nonlinear 12-variable system. Exogenous drivers are i.i.d. uniform; every
other variable follows its generating equation plus standard normal noise.

The generating equations contain explosive recursions (for instance the
``-1.23 x2[t-4]`` self term of the linear system). To keep every trajectory
bounded without removing any dependency, a variable's own lagged values enter
its equation through the soft bound ``b(v) = c * tanh(v / c)`` with ``c = 1``.
Cross-variable inputs are used as generated. Drivers are drawn from
``U[0, driver_high]`` with a per-system scale, and every value is clamped to
``[-1e6, 1e6]`` as a last resort.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import EnsembleConfig, TimeSeriesDataset

CLAMP = 1e6


@dataclass(frozen=True)
class GroundTruth:
    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=bool)
        np.fill_diagonal(a, False)
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n_links(self) -> int:
        return int(self.adjacency.sum())


@dataclass(frozen=True)
class BenchmarkSpec:
    n: int
    T: int
    tau_max: int
    partitions: int
    partition_length: int
    drivers: tuple[int, ...]
    links: tuple[tuple[int, int], ...]
    driver_high: float = 2.0


# 1-based variable numbers, as in the generating equations.
BENCHMARKS = {
    1: BenchmarkSpec(5, 20_000, 4, 10, 3000, (1, 4),
                     ((1, 2), (2, 3), (4, 5))),
    2: BenchmarkSpec(5, 30_000, 5, 12, 3750, (1, 4),
                     ((1, 2), (2, 3), (1, 5), (4, 5))),
    3: BenchmarkSpec(12, 45_000, 6, 15, 4500, (1, 4, 9),
                     ((1, 2), (9, 3), (1, 5), (4, 5), (8, 6), (9, 7), (3, 8),
                      (5, 10), (1, 11), (12, 11), (9, 12), (10, 12))),
}

SOFT_BOUND = 1.0


def _eq_linear(x, b, t, e):
    x[2, t] = 1.34 * x[1, t - 2] - 1.23 * b(x[2, t - 4]) + e[2]
    x[3, t] = -1.26 * x[2, t - 1] + 1.03 * x[2, t - 2] + e[3]
    x[5, t] = 0.71 * x[4, t - 2] + 1.05 * x[4, t - 3] + e[5]


def _eq_nonlinear(x, b, t, e):
    x1, x2, x4 = x[1], x[2], x[4]
    x[2, t] = (1.06 * b(x[2, t - 1]) - 1.22 * x1[t - 3] * b(x[2, t - 2])
               - 1.41 * x1[t - 3] ** 2 * x1[t - 4] + e[2])
    x[3, t] = (-1.23 * x2[t - 1] * x2[t - 2] * b(x[3, t - 2]) + 0.69 * x2[t - 1] ** 2
               + 1.07 * x2[t - 2] ** 2 * x2[t - 5] * b(x[3, t - 3]) + e[3])
    x[5, t] = (-0.78 * x1[t - 4] * x4[t - 2] + 0.91 * x4[t - 1] ** 2 * b(x[5, t - 4])
               - 0.86 * x1[t - 1] ** 2 * b(x[5, t - 2]) + 1.17 * x1[t - 5] * x4[t - 3]
               + e[5])


def _eq_complex(x, b, t, e):
    x1, x3, x4, x5, x8, x9, x10, x12 = x[1], x[3], x[4], x[5], x[8], x[9], x[10], x[12]
    x[2, t] = 0.99 * x1[t - 3] * b(x[2, t - 2]) - 1.24 * x1[t - 2] * x1[t - 4] ** 2 + e[2]
    x[3, t] = (-1.06 * x9[t - 2] * b(x[3, t - 2]) + 0.54 * x9[t - 1] ** 2
               + 0.72 * x9[t - 5] ** 2 * b(x[3, t - 3]) + e[3])
    x[5, t] = -0.86 * x1[t - 6] + 0.67 * x4[t - 1] - 0.88 * x1[t - 2] * x4[t - 2] + e[5]
    x[6, t] = (0.69 * b(x[6, t - 1]) * x8[t - 2] ** 2 - 0.59 * math.sin(x8[t - 1])
               + e[6])
    x[7, t] = (0.91 * b(x[7, t - 2]) * x9[t - 3] ** 2 + 0.66 * b(x[7, t - 4]) * x9[t - 4]
               - 0.33 * math.exp(x9[t - 2]) + e[7])
    x[8, t] = 1.18 * x3[t - 1] - 0.71 * math.cos(x3[t - 3]) * b(x[8, t - 3]) + e[8]
    x[10, t] = 0.78 * x5[t - 2] * b(x[10, t - 3]) + 1.02 * x5[t - 6] + e[10]
    x[11, t] = 1.31 * x1[t - 2] ** 2 * x12[t - 4] + 1.14 * x12[t - 2] ** 2 * x1[t - 1] + e[11]
    x[12, t] = (0.68 * x10[t - 5] * b(x[12, t - 4])
                + 0.26 * x9[t - 2] * x10[t - 2] ** 2 * b(x[12, t - 2])
                - 0.45 * x9[t - 3] * x10[t - 4] + e[12])


_EQUATIONS = {1: _eq_linear, 2: _eq_nonlinear, 3: _eq_complex}


def ground_truth(dataset_id: int) -> GroundTruth:
    spec = BENCHMARKS[dataset_id]
    adj = np.zeros((spec.n, spec.n), dtype=bool)
    for src, dst in spec.links:
        adj[src - 1, dst - 1] = True
    return GroundTruth(adj)


def recommended_config(dataset_id: int, seed: int = 0) -> EnsembleConfig:
    spec = BENCHMARKS[dataset_id]
    return EnsembleConfig(partitions=spec.partitions,
                          partition_length=spec.partition_length,
                          tau_max=spec.tau_max, rng_seed=seed)


def generate(dataset_id: int, seed: int = 0, T: int | None = None,
             driver_high: float | None = None, soft_bound: float = SOFT_BOUND):
    """Simulate one benchmark system.

    Returns ``(dataset, truth, config)``. ``T`` overrides the benchmark length
    and ``driver_high`` the upper end of the driver distribution.
    """
    if dataset_id not in BENCHMARKS:
        raise ValueError(f"unknown dataset {dataset_id!r}; choose 1, 2 or 3")
    spec = BENCHMARKS[dataset_id]
    T = spec.T if T is None else int(T)
    driver_high = spec.driver_high if driver_high is None else float(driver_high)
    burn = 10 * spec.tau_max
    total = T + burn
    root = np.random.SeedSequence(seed)
    driver_seq, noise_seq = root.spawn(2)
    x = np.zeros((spec.n + 1, total))  # row 0 unused: rows are 1-based
    for d, ss in zip(spec.drivers, driver_seq.spawn(len(spec.drivers))):
        x[d] = np.random.default_rng(ss).uniform(0.0, driver_high, total)
    dependents = [v for v in range(1, spec.n + 1) if v not in spec.drivers]
    noise = np.zeros((spec.n + 1, total))
    for v, ss in zip(dependents, noise_seq.spawn(len(dependents))):
        noise[v] = np.random.default_rng(ss).standard_normal(total)
    for v in dependents:
        x[v, :spec.tau_max + 1] = noise[v, :spec.tau_max + 1]

    c = float(soft_bound)

    def bound(v):
        return c * math.tanh(v / c)

    step = _EQUATIONS[dataset_id]
    for t in range(spec.tau_max + 1, total):
        step(x, bound, t, noise[:, t])
        for v in dependents:
            if not -CLAMP <= x[v, t] <= CLAMP:
                x[v, t] = CLAMP if x[v, t] > 0 else -CLAMP
    names = tuple(f"X{i}" for i in range(1, spec.n + 1))
    data = TimeSeriesDataset(names, x[1:, burn:])
    return data, ground_truth(dataset_id), recommended_config(dataset_id, seed)
