import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from causens.stats import (DegenerateData, DegenerateTestWarning, KTooLarge,
                           NonPositiveArgument, ZeroVariance, betainc, digamma, f_sf,
                           f_test_p, gmm_fit_2, knn_distances, knn_query, ols, pearson,
                           t_test_two_sided)

from oracles import f_sf_quad, knn_brute


class TestOls:
    def test_exact_fit(self):
        X = np.column_stack([np.ones(5), np.arange(5.0)])
        fit = ols(X, 2 + 3 * np.arange(5.0))
        np.testing.assert_allclose(fit.coefficients, [2, 3])
        assert fit.rss == pytest.approx(0, abs=1e-20)

    def test_rank_deficient_falls_back(self):
        x = np.arange(6.0)
        X = np.column_stack([np.ones(6), x, 2 * x])
        fit = ols(X, x)
        assert fit.rss == pytest.approx(0, abs=1e-12)


class TestTails:
    # frozen from scipy.stats.f.sf / scipy.stats.t.sf
    @pytest.mark.parametrize("f, d1, d2, expected", [
        (4, 2, 100, 0.021321228555156713),
        (1.5, 3, 50, 0.2259428787440231),
        (10, 1, 10, 0.010119559735433718),
    ])
    def test_f_tail_frozen(self, f, d1, d2, expected):
        assert f_sf(f, d1, d2) == pytest.approx(expected, abs=1e-12)

    def test_t_two_sided_frozen(self):
        # t = 2 with 30 df corresponds to r^2 = t^2 / (t^2 + df)
        r = math.sqrt(4 / 34)
        assert t_test_two_sided(r, 30) == pytest.approx(0.0546250449629831, abs=1e-12)

    def test_betainc_edges(self):
        assert betainc(2, 3, 0) == 0
        assert betainc(2, 3, 1) == 1
        assert betainc(1, 1, 0.37) == pytest.approx(0.37)

    def test_f_test_nested_models(self):
        # (rss_r - rss_f)/1 / (rss_f/20) = 4 -> same tail as F(1, 20) at 4
        assert f_test_p(12.0, 10.0, 1, 20) == pytest.approx(f_sf(4.0, 1, 20))
        assert f_test_p(10.0, 10.0, 1, 20) == 1.0

    def test_f_test_perfect_fit_warns(self):
        with pytest.warns(DegenerateTestWarning):
            assert f_test_p(1.0, 0.0, 2, 10) == 0.0
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            assert f_test_p(0.0, 0.0, 2, 10) == 1.0

    @given(st.floats(0.01, 50), st.integers(1, 8), st.integers(5, 400))
    def test_f_tail_matches_integration(self, f, d1, d2):
        assert f_sf(f, d1, d2) == pytest.approx(f_sf_quad(f, d1, d2), abs=1e-8)


class TestPearsonDigamma:
    def test_pearson(self):
        assert pearson([1, 2, 3], [2, 4, 6.5]) == pytest.approx(0.9979487157886733)  # numpy.corrcoef
        with pytest.raises(ZeroVariance):
            pearson([1, 1, 1], [1, 2, 3])

    def test_digamma_known_values(self):
        euler = 0.5772156649015329
        assert digamma(1) == pytest.approx(-euler, abs=1e-13)
        assert digamma(0.5) == pytest.approx(-euler - 2 * math.log(2), abs=1e-13)
        # recurrence psi(x + 1) = psi(x) + 1 / x
        x = np.linspace(0.3, 40, 50)
        np.testing.assert_allclose(digamma(x + 1), digamma(x) + 1 / x, atol=1e-12)

    def test_digamma_domain(self):
        with pytest.raises(NonPositiveArgument):
            digamma(0)


class TestKnn:
    def test_matches_full_scan(self, rng):
        for _ in range(50):
            pts = rng.integers(0, 4, size=(30, 2)).astype(float)  # many ties
            i = int(rng.integers(30))
            k = int(rng.integers(1, 10))
            for metric in ("max", "euclidean"):
                idx, d = knn_query(pts, i, k, metric)
                bidx, bd = knn_brute(pts, i, k, metric)
                assert list(idx) == bidx
                np.testing.assert_allclose(d, bd)

    def test_k_bounds(self):
        with pytest.raises(KTooLarge):
            knn_query(np.zeros((3, 1)), 0, 3)

    def test_distances_exclude_self(self, rng):
        pts = rng.random((40, 3))
        d, idx = knn_distances(pts, 2)
        assert np.all(idx != np.arange(40)[:, None])
        assert np.all(d[:, 0] <= d[:, 1])


class TestGmm:
    def test_two_clouds(self, rng):
        a = rng.normal(0, 0.05, (200, 3))
        b = rng.normal(1, 0.05, (200, 3))
        fit = gmm_fit_2(np.vstack([a, b]), seed=1)
        high = int(np.argmax(fit.means.mean(axis=1)))
        assert np.all(fit.assignment[200:] == high)
        assert np.all(fit.assignment[:200] != high)

    def test_log_likelihood_monotone(self, rng):
        X = np.vstack([rng.normal(0, 1, (50, 2)), rng.normal(3, 1, (50, 2))])
        fit = gmm_fit_2(X, initializations=1, seed=0)
        assert np.all(np.diff(fit.history) >= -1e-8)

    def test_deterministic(self, rng):
        X = rng.random((60, 4))
        a, b = gmm_fit_2(X, seed=5), gmm_fit_2(X, seed=5)
        np.testing.assert_array_equal(a.assignment, b.assignment)
        assert a.log_likelihood == b.log_likelihood

    def test_degenerate(self):
        with pytest.raises(DegenerateData):
            gmm_fit_2(np.ones((10, 3)))
        with pytest.raises(DegenerateData):
            gmm_fit_2(np.random.default_rng(0).random((3, 3)))
