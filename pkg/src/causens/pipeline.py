"""End-to-end ensemble: windows, base learners, fusion, rules, pruning."""
from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (CausalGraph, CausensError, EnsembleConfig, StrengthMatrix,
                   TimeSeriesDataset, TrustMatrix, validate_dataset)
from .ensemble import gmm_ensemble
from .evaluation import credibility_score
from .graph import remove_indirect, to_graph
from .learners import LEARNER_NAMES, LEARNERS
from .partition import plan_partitions, slice_dataset
from .rules import apply_rules, trust_floor_filter

log = logging.getLogger(__name__)


class PipelineFailure(CausensError):
    pass


@dataclass
class PipelineResult:
    names: tuple[str, ...]
    config: EnsembleConfig
    window_matrices: dict[str, list[StrengthMatrix]]
    me: dict[str, StrengthMatrix]
    trust: dict[str, TrustMatrix]
    mre: StrengthMatrix
    mre_bar: StrengthMatrix
    graph: CausalGraph
    cs: float
    failures: list[str] = field(default_factory=list)


def task_seed(rng_seed: int, learner_index: int, partition_index: int) -> int:
    """Seed for one (learner, window) task, independent of scheduling."""
    seq = np.random.SeedSequence([rng_seed, learner_index, partition_index])
    return int(seq.generate_state(1)[0])


def _run_task(args):
    name, window, cfg, seed = args
    try:
        return LEARNERS[name](window, cfg, seed=seed), None
    except Exception as exc:  # a failing learner degrades to "no evidence"
        return StrengthMatrix.zeros(window.n), f"{type(exc).__name__}: {exc}"


def default_jobs() -> int:
    env = os.environ.get("CAUSENS_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer CAUSENS_JOBS=%r", env)
    return 1


def run_learners(dataset: TimeSeriesDataset, cfg: EnsembleConfig, jobs: int = 1,
                 learners=LEARNER_NAMES):
    """Per-learner lists of window strength matrices, plus failure messages."""
    learners = list(learners)
    plan = plan_partitions(dataset.T, cfg.partitions, cfg.partition_length)
    windows = slice_dataset(dataset, plan)
    keys = [(name, k) for name in learners for k in range(len(windows))]
    tasks = [(name, windows[k], cfg, task_seed(cfg.rng_seed, LEARNER_NAMES.index(name), k))
             for name, k in keys]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_task, tasks))
    else:
        results = [_run_task(t) for t in tasks]
    out = {name: [] for name in learners}
    failures = []
    for (name, k), (matrix, err) in zip(keys, results):
        if err is not None:
            msg = f"{name} window {k}: {err}"
            log.warning("learner failed, using a zero matrix: %s", msg)
            failures.append(msg)
        out[name].append(matrix)
    if failures and len(failures) == len(tasks):
        raise PipelineFailure("every learner failed on every window")
    return out, failures


def combine(names, window_matrices: dict[str, list[StrengthMatrix]],
            cfg: EnsembleConfig, failures=None) -> PipelineResult:
    """Fusion, rules, pruning and credibility from precomputed window matrices."""
    me, trust = {}, {}
    for name, mats in window_matrices.items():
        me[name], trust[name] = gmm_ensemble(mats, cfg)
    learners = list(window_matrices)
    mre = apply_rules([me[l] for l in learners], [trust[l] for l in learners],
                      cfg.alpha21, cfg.alpha22, cfg.trust_floor)
    mre_bar = remove_indirect(mre)
    if cfg.cs_post_filter:
        cs_inputs = [trust_floor_filter(me[l], trust[l], cfg.trust_floor) for l in learners]
    else:
        cs_inputs = [me[l] for l in learners]
    cs = credibility_score(mre_bar, cs_inputs)
    return PipelineResult(tuple(names), cfg, window_matrices, me, trust, mre, mre_bar,
                          to_graph(mre_bar, names), cs, list(failures or []))


def run_pipeline(dataset: TimeSeriesDataset, cfg: EnsembleConfig | None = None,
                 jobs: int | None = None) -> PipelineResult:
    """Run the whole ensemble on one dataset."""
    cfg = cfg or EnsembleConfig()
    validate_dataset(dataset)
    cfg.check_for(dataset.T)
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    window_matrices, failures = run_learners(dataset, cfg, jobs)
    return combine(dataset.names, window_matrices, cfg, failures)
