import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onebit_mimo.numerics import (
    NumericsError,
    as_cmat,
    inverse_mills,
    log_std_normal_cdf,
    nuclear_norm,
    project_nuclear_ball,
    project_simplex,
    std_normal_cdf,
    svd,
    top_singular_pair,
)

from conftest import crandn
from oracles import nuclear_ball_projection_eigh, simplex_projection_active_set

finite = st.floats(min_value=-30, max_value=30, allow_nan=False)


class TestNormalCdf:
    def test_values(self):
        assert std_normal_cdf(0.0) == 0.5
        # erf oracle (mpmath, 40 digits)
        assert std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-15)
        assert std_normal_cdf(-1.0) == pytest.approx(0.15865525393145707, abs=1e-15)

    @given(finite)
    def test_symmetry(self, x):
        assert std_normal_cdf(x) + std_normal_cdf(-x) == pytest.approx(1.0, abs=1e-14)

    @given(finite, finite)
    def test_monotone(self, x, y):
        lo, hi = min(x, y), max(x, y)
        assert std_normal_cdf(lo) <= std_normal_cdf(hi)

    def test_log_values(self):
        assert log_std_normal_cdf(0.0) == pytest.approx(-np.log(2), rel=1e-15)
        # mpmath log(ncdf(x)) at 50 digits
        assert log_std_normal_cdf(5.0) == pytest.approx(-2.8665161296376359e-07, rel=1e-12)
        assert log_std_normal_cdf(-40.0) == pytest.approx(-804.60844201375379, rel=1e-14)

    def test_log_tail_asymptote(self):
        x = -40.0
        approx = -x * x / 2 - np.log(-x * np.sqrt(2 * np.pi))
        assert log_std_normal_cdf(x) == pytest.approx(approx, rel=1e-5)

    def test_log_consistency(self):
        x = np.linspace(-8, 8, 4001)
        np.testing.assert_allclose(np.exp(log_std_normal_cdf(x)), std_normal_cdf(x), rtol=1e-12)

    def test_log_against_extended_precision(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 40
        xs = np.linspace(-5, 5, 201)
        ref = np.array([float(mpmath.log(mpmath.ncdf(mpmath.mpf(x)))) for x in xs])
        np.testing.assert_allclose(log_std_normal_cdf(xs), ref, rtol=1e-12)
        # the naive route agrees wherever Phi(x) is not close to 1
        neg = xs <= 0
        np.testing.assert_allclose(
            log_std_normal_cdf(xs[neg]), np.log(std_normal_cdf(xs[neg])), rtol=1e-12
        )

    def test_inverse_mills(self):
        assert inverse_mills(0.0) == pytest.approx(0.7978845608028654, rel=1e-14)
        t = np.array([-50.0, -200.0, -1e4])
        lam = inverse_mills(t)
        assert np.all(np.isfinite(lam))
        # asymptote |t| + 1/|t|
        np.testing.assert_allclose(lam, -t + 1 / -t, rtol=1e-3)
        assert inverse_mills(-1e4) == pytest.approx(1e4 + 1e-4, rel=1e-10)

    def test_inverse_mills_against_extended_precision(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 60
        for t in (-3.0, -9.99, -10.0, -10.01, -25.0, -300.0, 2.0):
            ref = mpmath.npdf(t) / mpmath.ncdf(t)
            assert inverse_mills(t) == pytest.approx(float(ref), rel=1e-13)


class TestSvd:
    def test_identity(self):
        f = svd(np.eye(4))
        np.testing.assert_allclose(f.singular_values, np.ones(4))

    def test_rank_one(self, rng):
        u = crandn(rng, 5)
        v = crandn(rng, 5)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        f = svd(np.outer(u, v.conj()))
        np.testing.assert_allclose(f.singular_values, [1, 0, 0, 0, 0], atol=1e-12)

    def test_random_reconstruction(self, rng):
        for _ in range(100):
            m, n = rng.integers(1, 33, size=2)
            A = crandn(rng, m, n)
            f = svd(A)
            assert np.linalg.norm(f.reconstruct() - A) < 1e-9 * np.linalg.norm(A)
            k = f.singular_values.size
            assert np.linalg.norm(f.left.conj().T @ f.left - np.eye(k)) < 1e-10
            assert np.linalg.norm(f.right.conj().T @ f.right - np.eye(k)) < 1e-10
            assert np.all(np.diff(f.singular_values) <= 0)
            assert np.all(f.singular_values >= 0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            as_cmat([[1.0, np.nan]])

    def test_failure_signal(self, monkeypatch):
        def boom(*a, **k):
            raise np.linalg.LinAlgError("SVD did not converge")

        monkeypatch.setattr(np.linalg, "svd", boom)
        with pytest.raises(NumericsError):
            svd(np.eye(2))

    def test_nuclear_norm(self, rng):
        assert nuclear_norm(np.eye(4)) == pytest.approx(4.0)
        assert nuclear_norm(np.diag([2.0, 1.0, 0.0])) == pytest.approx(3.0)
        A = crandn(rng, 6, 6)
        assert nuclear_norm(A) == pytest.approx(svd(A).singular_values.sum(), abs=1e-10)


class TestPowerIteration:
    def test_diagonal(self):
        u, s, v = top_singular_pair(np.diag([3.0, 1.0]))
        assert s == pytest.approx(3.0, rel=1e-9)
        assert abs(abs(u[0]) - 1) < 1e-6 and abs(abs(v[0]) - 1) < 1e-6
        # common phase between u and v
        assert np.vdot(u, np.diag([3.0, 1.0]) @ v).real == pytest.approx(3.0, rel=1e-9)

    def test_exact_rank_one(self, rng):
        u0 = crandn(rng, 7)
        v0 = crandn(rng, 7)
        u0 /= np.linalg.norm(u0)
        v0 /= np.linalg.norm(v0)
        u, s, v = top_singular_pair(2.5 * np.outer(u0, v0.conj()))
        assert s == pytest.approx(2.5, rel=1e-12)
        assert abs(np.vdot(u0, u)) == pytest.approx(1.0, abs=1e-10)
        assert abs(np.vdot(v0, v)) == pytest.approx(1.0, abs=1e-10)

    def test_random_against_svd(self, rng):
        for _ in range(20):
            A = crandn(rng, 16, 16)
            u, s, v, (change, ok) = top_singular_pair(
                A, tol=1e-12, max_iter=5000, rng=rng, return_info=True
            )
            s_ref = svd(A).singular_values[0]
            assert abs(s - s_ref) <= 1e-6 * s_ref
            assert np.linalg.norm(u) == pytest.approx(1.0)
            assert np.linalg.norm(v) == pytest.approx(1.0)

    def test_zero_matrix(self):
        with pytest.raises(NumericsError):
            top_singular_pair(np.zeros((3, 3)))

    def test_tied_values_report_tolerance(self):
        A = np.diag([1.0, 1.0, 0.5])
        u, s, v, (change, converged) = top_singular_pair(A, max_iter=50, return_info=True)
        assert s == pytest.approx(1.0, rel=1e-9)
        assert converged and change <= 1e-10

    def test_deterministic(self, rng):
        A = crandn(rng, 8, 8)
        a = top_singular_pair(A, rng=np.random.default_rng(3))
        b = top_singular_pair(A, rng=np.random.default_rng(3))
        np.testing.assert_array_equal(a[0], b[0])
        assert a[1] == b[1]


class TestSimplexProjection:
    @pytest.mark.parametrize(
        "d, beta, expected",
        [
            ([3, 1, 0], 2, [2, 0, 0]),
            ([1, 1], 2, [1, 1]),
            ([0.5, 0.5], 2, [1, 1]),
        ],
    )
    def test_examples(self, d, beta, expected):
        np.testing.assert_allclose(project_simplex(d, beta), expected, atol=1e-15)

    def test_bad_beta(self):
        with pytest.raises(ValueError):
            project_simplex([1.0], 0.0)

    @settings(max_examples=200)
    @given(
        st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=7),
        st.floats(0.01, 20),
    )
    def test_matches_active_set_oracle(self, d, beta):
        p = project_simplex(d, beta)
        assert p.sum() == pytest.approx(beta, rel=1e-12, abs=1e-12)
        assert np.all(p >= 0)
        np.testing.assert_allclose(p, simplex_projection_active_set(d, beta), atol=1e-9)


class TestNuclearBall:
    def test_interior_unchanged(self, rng):
        Z = crandn(rng, 4, 4)
        beta = 2 * nuclear_norm(Z)
        np.testing.assert_array_equal(project_nuclear_ball(Z, beta), Z)

    def test_diagonal(self):
        X = project_nuclear_ball(np.diag([3.0, 1.0]), 2.0)
        np.testing.assert_allclose(X, np.diag([2.0, 0.0]), atol=1e-12)

    def test_rank_one_rescale(self, rng):
        u = crandn(rng, 5)
        v = crandn(rng, 5)
        u /= np.linalg.norm(u)
        v /= np.linalg.norm(v)
        X = project_nuclear_ball(3 * np.outer(u, v.conj()), 2.0)
        np.testing.assert_allclose(X, 2 * np.outer(u, v.conj()), atol=1e-12)

    def test_sphere_mode_inflates(self, rng):
        Z = crandn(rng, 4, 4)
        beta = 3 * nuclear_norm(Z)
        X = project_nuclear_ball(Z, beta, mode="sphere")
        assert nuclear_norm(X) == pytest.approx(beta, rel=1e-10)

    def test_matches_eigh_oracle(self, rng):
        for _ in range(50):
            Z = crandn(rng, 4, 4)
            beta = rng.uniform(0.2, 1.2) * nuclear_norm(Z)
            X = project_nuclear_ball(Z, beta)
            assert nuclear_norm(X) <= beta + 1e-8
            assert np.linalg.norm(X - nuclear_ball_projection_eigh(Z, beta)) < 1e-8

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.floats(0.1, 2.0))
    def test_idempotent(self, seed, frac):
        r = np.random.default_rng(seed)
        Z = crandn(r, 5, 5)
        beta = frac * nuclear_norm(Z)
        X = project_nuclear_ball(Z, beta)
        assert np.linalg.norm(project_nuclear_ball(X, beta) - X) < 1e-10

    def test_optimal_against_random_feasible_points(self, rng):
        for _ in range(5):
            Z = crandn(rng, 4, 4)
            beta = 0.5 * nuclear_norm(Z)
            X = project_nuclear_ball(Z, beta)
            d_star = np.linalg.norm(Z - X)
            cand = crandn(rng, 10_000, 4, 4)
            norms = np.linalg.svd(cand, compute_uv=False).sum(axis=1)
            cand *= (beta * rng.uniform(0, 1, 10_000) ** 0.25 / norms)[:, None, None]
            dists = np.linalg.norm(Z - cand, axis=(1, 2))
            assert d_star <= dists.min() + 1e-12
