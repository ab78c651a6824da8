"""Numerical kernels shared by the learners and the fusion phase.

Least squares, F and Student-t tail probabilities (via a continued-fraction
incomplete beta), Pearson correlation, digamma, nearest-neighbour queries and
a two-component Gaussian mixture fitted by EM.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .core import CausensError


class SingularDesign(CausensError):
    pass


class ZeroVariance(CausensError):
    pass


class NonPositiveArgument(CausensError, ValueError):
    pass


class KTooLarge(CausensError, ValueError):
    pass


class DegenerateData(CausensError):
    pass


class DegenerateTestWarning(RuntimeWarning):
    """An F test whose full model fits perfectly; p is reported as 0."""


# -- least squares -------------------------------------------------------------

RIDGE = 1e-10


@dataclass(frozen=True)
class OlsFit:
    coefficients: np.ndarray
    residuals: np.ndarray
    rss: float


def ols(design, targets) -> OlsFit:
    """Least-squares fit of ``targets`` on the columns of ``design``.

    Uses a QR factorisation; a rank-deficient design falls back to a ridge
    solve with ``1e-10`` on the diagonal of the normal equations.
    """
    X = np.asarray(design, dtype=float)
    y = np.asarray(targets, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m, p = X.shape
    if y.shape != (m,):
        raise ValueError(f"targets shape {y.shape} does not match design rows {m}")
    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    scale = diag.max() if p else 0.0
    if p and scale > 0 and diag.min() > 1e-10 * scale:
        beta = np.linalg.solve(r, q.T @ y)
    else:
        gram = X.T @ X + RIDGE * np.eye(p)
        try:
            beta = np.linalg.solve(gram, X.T @ y)
        except np.linalg.LinAlgError as exc:
            raise SingularDesign("design is singular even after ridge fallback") from exc
        if not np.all(np.isfinite(beta)):
            raise SingularDesign("design is singular even after ridge fallback")
    resid = y - X @ beta
    return OlsFit(beta, resid, float(resid @ resid))


# -- incomplete beta and tail probabilities -----------------------------------

def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = tiny if abs(d) < tiny else d
    d = 1.0 / d
    h = d
    for m in range(1, 10000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = tiny if abs(d) < tiny else d
        c = 1.0 + aa / c
        c = tiny if abs(c) < tiny else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc(a: float, b: float, x: float) -> float:
    """Regularised incomplete beta function ``I_x(a, b)``."""
    if a <= 0 or b <= 0:
        raise NonPositiveArgument("betainc needs a, b > 0")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f_stat: float, df_num: float, df_den: float) -> float:
    """Upper tail ``P(F > f_stat)`` of the F distribution."""
    if df_num <= 0 or df_den <= 0:
        raise ValueError("degrees of freedom must be positive")
    if not f_stat > 0:
        return 1.0
    if math.isinf(f_stat):
        return 0.0
    x = df_den / (df_den + df_num * f_stat)
    return min(1.0, max(0.0, betainc(df_den / 2.0, df_num / 2.0, x)))


def f_test_p(rss_restricted: float, rss_full: float, df_num: int, df_den: int) -> float:
    """p-value of the nested-model F test.

    A perfect full model (``rss_full == 0``) is reported as ``p = 0`` with a
    :class:`DegenerateTestWarning`.
    """
    if rss_restricted < 0 or rss_full < 0:
        raise ValueError("residual sums of squares must be non-negative")
    if df_num < 1 or df_den < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if rss_full == 0:
        if rss_restricted == 0:
            return 1.0
        warnings.warn("full model fits perfectly; F test degenerate",
                      DegenerateTestWarning, stacklevel=2)
        return 0.0
    f_stat = ((rss_restricted - rss_full) / df_num) / (rss_full / df_den)
    return f_sf(f_stat, df_num, df_den)


def t_test_two_sided(r: float, df: int) -> float:
    """Two-sided p-value for a sample (partial) correlation ``r``."""
    if df < 1:
        return 1.0
    r2 = min(r * r, 1.0)
    if r2 >= 1.0:
        return 0.0
    # t^2 = df r^2 / (1 - r^2); P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    x = (1.0 - r2)
    return min(1.0, max(0.0, betainc(df / 2.0, 0.5, x)))


# -- correlation ---------------------------------------------------------------

def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("pearson needs two equal-length vectors of length >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = xc @ xc
    syy = yc @ yc
    if sxx <= 0 or syy <= 0:
        raise ZeroVariance("zero variance input")
    r = (xc @ yc) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, float(r)))


# -- digamma -------------------------------------------------------------------

# Bernoulli-number coefficients B_2k / (2k) of the asymptotic series.
_DIGAMMA_ASYMPTOTIC = (1 / 12, -1 / 120, 1 / 252, -1 / 240, 1 / 132,
                       -691 / 32760, 1 / 12)


def digamma(x):
    """Digamma function for positive arguments (scalar or array).

    Shifts the argument above 10 with the recurrence
    ``psi(x) = psi(x + 1) - 1/x`` and then sums the asymptotic series.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise NonPositiveArgument("digamma is only defined here for x > 0")
    shift = np.zeros_like(arr)
    z = arr.copy()
    while True:
        small = z < 10.0
        if not np.any(small):
            break
        shift = shift - np.where(small, 1.0 / np.where(small, z, 1.0), 0.0)
        z = np.where(small, z + 1.0, z)
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for coef in reversed(_DIGAMMA_ASYMPTOTIC):
        series = (series + coef) * inv2
    out = np.log(z) - 0.5 / z - series + shift
    return float(out) if np.ndim(x) == 0 else out


# -- nearest neighbours --------------------------------------------------------

def _p_norm(metric: str) -> float:
    if metric in ("max", "chebyshev", "maxnorm", "max-norm"):
        return np.inf
    if metric == "euclidean":
        return 2.0
    raise ValueError(f"unknown metric {metric!r}")


def knn_query(points, query_index: int, k: int, metric: str = "max"):
    """The ``k`` nearest neighbours of ``points[query_index]`` (self excluded).

    Returns ``(indices, distances)`` sorted by distance, ties broken by the
    lower index. Backed by a k-d tree.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    m = len(pts)
    if not 0 < k < m:
        raise KTooLarge(f"k={k} must satisfy 0 < k < {m}")
    p = _p_norm(metric)
    tree = cKDTree(pts)
    q = pts[query_index]
    d, _ = tree.query(q, k=k + 1, p=p)
    radius = float(np.max(d))
    cand = np.asarray(tree.query_ball_point(q, radius * (1 + 1e-12) + 1e-300, p=p))
    cand = cand[cand != query_index]
    diff = np.abs(pts[cand] - q)
    dist = diff.max(axis=1) if p == np.inf else np.sqrt((diff ** 2).sum(axis=1))
    order = np.lexsort((cand, dist))[:k]
    return cand[order], dist[order]


def knn_distances(points, k: int, metric: str = "max") -> tuple[np.ndarray, np.ndarray]:
    """k-th neighbour distance and indices for every point (self excluded)."""
    pts = np.asarray(points, dtype=float)
    if not 0 < k < len(pts):
        raise KTooLarge(f"k={k} must satisfy 0 < k < {len(pts)}")
    d, idx = cKDTree(pts).query(pts, k=k + 1, p=_p_norm(metric))
    return d[:, 1:], idx[:, 1:]


# -- two-component Gaussian mixture -------------------------------------------

@dataclass(frozen=True)
class GmmFit:
    means: np.ndarray
    covariances: np.ndarray
    weights: np.ndarray
    log_likelihood: float
    assignment: np.ndarray
    responsibilities: np.ndarray
    history: tuple[float, ...] = ()


def _log_gaussian(X, mean, cov):
    D = X.shape[1]
    chol = np.linalg.cholesky(cov)
    sol = np.linalg.solve(chol, (X - mean).T)
    maha = (sol * sol).sum(axis=0)
    logdet = 2.0 * np.log(np.diag(chol)).sum()
    return -0.5 * (D * math.log(2 * math.pi) + logdet + maha)


def _estep(X, weights, means, covs):
    logp = np.column_stack([math.log(weights[c]) + _log_gaussian(X, means[c], covs[c])
                            for c in range(2)])
    top = logp.max(axis=1, keepdims=True)
    norm = top[:, 0] + np.log(np.exp(logp - top).sum(axis=1))
    return np.exp(logp - norm[:, None]), float(norm.sum())


def _mstep(X, resp, reg):
    D = X.shape[1]
    nk = resp.sum(axis=0) + 10 * np.finfo(float).eps
    weights = nk / nk.sum()
    means = (resp.T @ X) / nk[:, None]
    covs = np.empty((2, D, D))
    for c in range(2):
        diff = X - means[c]
        covs[c] = (resp[:, c, None] * diff).T @ diff / nk[c]
        covs[c].flat[::D + 1] += reg
    return weights, means, covs


def _kmeanspp_seed(X, rng):
    first = rng.integers(len(X))
    d2 = ((X - X[first]) ** 2).sum(axis=1)
    if d2.sum() == 0:
        return None
    second = rng.choice(len(X), p=d2 / d2.sum())
    return np.stack([X[first], X[second]])


def gmm_fit_2(data, initializations: int = 10, max_iters: int = 200,
              regularizer: float = 1e-6, seed: int = 0, tol: float = 1e-7) -> GmmFit:
    """Fit a two-component full-covariance Gaussian mixture by EM.

    Each initialisation seeds the means k-means++ style and starts from the
    pooled diagonal covariance; the fit with the best final log-likelihood
    wins (ties go to the earliest initialisation).
    """
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    m, D = X.shape
    if m < 4:
        raise DegenerateData(f"need at least 4 rows, got {m}")
    if np.all(X == X[0]):
        raise DegenerateData("all rows are identical")
    rng = np.random.default_rng(seed)
    start_cov = np.diag(X.var(axis=0) + regularizer)
    best = None
    for _ in range(initializations):
        centers = _kmeanspp_seed(X, rng)
        # hard split by nearest seed, then one M step from that split
        d = ((X[:, None, :] - centers[None]) ** 2).sum(axis=2)
        resp = np.zeros((m, 2))
        resp[np.arange(m), d.argmin(axis=1)] = 1.0
        if resp[:, 0].sum() == 0 or resp[:, 1].sum() == 0:
            resp[:] = 0.5
        weights = resp.mean(axis=0)
        means = centers.copy()
        covs = np.stack([start_cov, start_cov])
        history = []
        try:
            resp, prev = _estep(X, weights, means, covs)
            history.append(prev)
            for _ in range(max_iters):
                weights, means, covs = _mstep(X, resp, regularizer)
                resp, ll = _estep(X, weights, means, covs)
                history.append(ll)
                if ll - prev < tol:
                    break
                prev = ll
        except np.linalg.LinAlgError:
            continue
        if best is None or history[-1] > best[0]:
            best = (history[-1], weights, means, covs, resp, tuple(history))
    if best is None:
        raise DegenerateData("EM failed for every initialisation")
    ll, weights, means, covs, resp, history = best
    return GmmFit(means=means, covariances=covs, weights=weights, log_likelihood=ll,
                  assignment=resp.argmax(axis=1), responsibilities=resp,
                  history=history)
