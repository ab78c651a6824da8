"""Shared data model: datasets, strength/trust matrices, configuration.

Matrix orientation is fixed for the whole package: entry ``(i, j)`` is the
evidence that variable ``i`` causes variable ``j``.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class CausensError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CausensError, ValueError):
    pass


class NonFiniteValue(ValidationError):
    pass


class DuplicateName(ValidationError):
    pass


class TooFewVariables(ValidationError):
    pass


class TooFewObservations(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


@dataclass(frozen=True)
class TimeSeriesDataset:
    """``n`` named variables observed over ``T`` time steps.

    ``values`` has one row per variable and one column per time step.
    """

    names: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise ValidationError(f"values must be 2-D, got shape {values.shape}")
        values.setflags(write=False)
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))
        object.__setattr__(self, "values", values)
        if len(self.names) != values.shape[0]:
            raise DimensionMismatch(
                f"{len(self.names)} names for {values.shape[0]} variables")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def window(self, start: int, length: int) -> "TimeSeriesDataset":
        return TimeSeriesDataset(self.names, self.values[:, start:start + length])


def validate_dataset(d: TimeSeriesDataset) -> TimeSeriesDataset:
    """Return ``d`` unchanged if it is usable for pairwise causal analysis."""
    if d.n < 2:
        raise TooFewVariables(f"need at least 2 variables, got {d.n}")
    if d.T < 2:
        raise TooFewObservations(f"need at least 2 observations, got {d.T}")
    seen = set()
    for name in d.names:
        if name in seen:
            raise DuplicateName(f"duplicate variable name {name!r}")
        seen.add(name)
    bad = np.argwhere(~np.isfinite(d.values))
    if len(bad):
        i, t = bad[0]
        raise NonFiniteValue(
            f"non-finite value {d.values[i, t]!r} at variable {i} "
            f"({d.names[i]}), time step {t}")
    return d


def _check_square(a: np.ndarray, what: str) -> np.ndarray:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{what} must be square, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class StrengthMatrix:
    """Causal strengths in [0, 1] with a zero diagonal."""

    s: np.ndarray

    def __post_init__(self):
        s = _check_square(np.array(self.s, dtype=float), "strength matrix")
        if not np.all(np.isfinite(s)):
            raise NonFiniteValue("strength matrix contains non-finite values")
        if np.any(np.diag(s) != 0):
            raise ValidationError("strength matrix diagonal must be zero")
        if np.any(s < 0) or np.any(s > 1):
            raise ValidationError("strengths must lie in [0, 1]")
        s.setflags(write=False)
        object.__setattr__(self, "s", s)

    @property
    def n(self) -> int:
        return self.s.shape[0]

    @classmethod
    def zeros(cls, n: int) -> "StrengthMatrix":
        return cls(np.zeros((n, n)))

    @classmethod
    def from_raw(cls, a) -> "StrengthMatrix":
        """Clip into [0, 1] and zero the diagonal before validating."""
        a = np.clip(np.nan_to_num(np.array(a, dtype=float), nan=0.0), 0.0, 1.0)
        np.fill_diagonal(a, 0.0)
        return cls(a)


@dataclass(frozen=True)
class TrustMatrix:
    """Non-negative trustworthiness scores paired with a fused strength matrix."""

    t: np.ndarray

    def __post_init__(self):
        t = _check_square(np.array(self.t, dtype=float), "trust matrix")
        if not np.all(np.isfinite(t)) or np.any(t < 0):
            raise ValidationError("trust values must be finite and non-negative")
        if np.any(np.diag(t) != 0):
            raise ValidationError("trust matrix diagonal must be zero")
        t.setflags(write=False)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.t.shape[0]


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    strength: float


@dataclass(frozen=True)
class CausalGraph:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]

    def edge_set(self) -> set[tuple[str, str]]:
        return {(e.source, e.target) for e in self.edges}


@dataclass(frozen=True)
class EnsembleConfig:
    """Every tunable of the pipeline.

    Defaults follow the published parameter settings where those exist.
    """

    partitions: int = 10
    partition_length: int = 3000
    tau_max: int = 4
    strength_floor: float = 0.3
    alpha21: float = 10.0
    alpha22: float = 2.0
    trust_floor: float = 1.0
    trust_cap: float = 1e6
    delta: float = 1e-20
    gc_p_threshold: float = 0.05
    pcmci_p_threshold: float = 0.05
    pcmci_max_conds: int = 3
    nte_k_neighbors: int = 6
    nte_shuffles: int = 5
    nte_history: int = 1
    nte_max_queries: int = 1500
    ccm_train_fraction: float = 0.75
    ccm_iterations: int = 25
    ccm_convergence_window: int = 6
    ccm_convergence_threshold: float = 0.03
    ccm_embedding_dim: int = 3
    ccm_embedding_lag: int = 1
    gmm_initializations: int = 10
    gmm_max_em_iters: int = 200
    gmm_covariance_regularizer: float = 1e-6
    cs_post_filter: bool = False
    rng_seed: int = 0

    def __post_init__(self):
        errors = []
        if self.partitions < 2:
            errors.append("partitions must be >= 2")
        if self.partition_length < 1:
            errors.append("partition_length must be positive")
        if self.tau_max < 1:
            errors.append("tau_max must be >= 1")
        if not 0 < self.ccm_train_fraction < 1:
            errors.append("ccm_train_fraction must lie in (0, 1)")
        for name in ("nte_k_neighbors", "nte_shuffles", "nte_history",
                     "nte_max_queries", "ccm_iterations", "ccm_convergence_window",
                     "ccm_embedding_dim", "ccm_embedding_lag", "gmm_initializations",
                     "gmm_max_em_iters", "pcmci_max_conds"):
            if getattr(self, name) < 1:
                errors.append(f"{name} must be positive")
        if self.ccm_convergence_window > self.ccm_iterations:
            errors.append("ccm_convergence_window cannot exceed ccm_iterations")
        if self.rng_seed < 0:
            errors.append("rng_seed must be non-negative")
        if errors:
            raise ConfigError("; ".join(errors))

    def replace(self, **changes) -> "EnsembleConfig":
        return dataclasses.replace(self, **changes)

    def check_for(self, T: int) -> None:
        if self.partition_length > T:
            raise ConfigError(
                f"partition_length {self.partition_length} exceeds series length {T}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _coerce(value: str, kind):
    if kind is bool:
        low = value.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"not a boolean: {value!r}")
    return kind(value)


def config_from_mapping(values: dict, base: EnsembleConfig | None = None) -> EnsembleConfig:
    base = base or EnsembleConfig()
    kinds = {f.name: type(getattr(base, f.name)) for f in dataclasses.fields(base)}
    changes = {}
    for key, raw in values.items():
        key = key.replace("-", "_")
        if key not in kinds:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            changes[key] = _coerce(raw, kinds[key]) if isinstance(raw, str) else kinds[key](raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return base.replace(**changes)


def read_config(path: str | Path, base: EnsembleConfig | None = None) -> EnsembleConfig:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = value
    return config_from_mapping(values, base)


def format_config(cfg: EnsembleConfig) -> str:
    lines = []
    for key, value in cfg.to_dict().items():
        lines.append(f"{key} = {repr(value) if isinstance(value, float) else value}")
    return "\n".join(lines) + "\n"


# -- JSON interchange ---------------------------------------------------------

def matrix_to_json(names: Sequence[str], matrix: np.ndarray) -> str:
    """Serialise a square matrix; floats use ``repr`` so parsing is exact."""
    matrix = np.asarray(matrix)
    if matrix.shape != (len(names), len(names)):
        raise DimensionMismatch(
            f"matrix shape {matrix.shape} does not match {len(names)} names")
    rows = [[v.item() for v in row] for row in matrix]
    return json.dumps({"names": list(names), "matrix": rows}, indent=1)


def matrix_from_json(text: str) -> tuple[list[str], np.ndarray]:
    obj = json.loads(text)
    names = [str(n) for n in obj["names"]]
    matrix = np.array(obj["matrix"])
    if matrix.size == 0:
        matrix = matrix.reshape(len(names), len(names))
    if matrix.shape != (len(names), len(names)):
        raise DimensionMismatch(
            f"matrix shape {matrix.shape} does not match {len(names)} names")
    return names, matrix


def write_text_atomic(path: str | Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.replace(path)


def write_matrix(path: str | Path, names: Sequence[str], matrix) -> None:
    write_text_atomic(path, matrix_to_json(names, np.asarray(matrix)))


def read_matrix(path: str | Path) -> tuple[list[str], np.ndarray]:
    return matrix_from_json(Path(path).read_text())


def offdiag_pairs(n: int) -> Iterable[tuple[int, int]]:
    """Ordered pairs ``(i, j)``, ``i != j``, in row-major order."""
    for i in range(n):
        for j in range(n):
            if i != j:
                yield i, j
