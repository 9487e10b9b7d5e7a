"""Domain manifolds: metric data, curvature, and the discrete Laplacian."""

import numpy as np
import pytest

from bochnerlab.domains import (
    FlatTorus2,
    RoundSphere2,
    christoffel_fd_at,
    ricci_fd_at,
    ricci_min,
)
from bochnerlab.errors import ChartDomainError, UsageError


def interior_points(domain, count, seed=0):
    rng = np.random.default_rng(seed)
    th, ph = domain.chart_grid()
    idx = rng.integers(2, domain.n1 - 2, count), rng.integers(0, domain.n2, count)
    return np.stack([th[idx], ph[idx]], axis=-1)


class TestFlatTorus:
    def test_metric_is_constant_diagonal(self):
        dom = FlatTorus2(a=2.0, b=0.5, n1=16, n2=16)
        np.testing.assert_allclose(dom.metric_at((0.3, 0.4)), np.diag([4.0, 0.25]))
        assert np.all(dom.christoffel_at((0.3, 0.4)) == 0.0)
        assert np.all(dom.ricci_at((0.3, 0.4)) == 0.0)

    def test_volume(self):
        dom = FlatTorus2(a=2.0, b=0.5, n1=32, n2=32)
        assert dom.volume() == pytest.approx(4 * np.pi**2 * 2.0 * 0.5, rel=1e-12)

    def test_ricci_min_zero(self):
        val, _ = ricci_min(FlatTorus2(a=1, b=1, n1=16, n2=16))
        assert val == pytest.approx(0.0, abs=1e-14)

    def test_laplacian_of_fourier_mode(self):
        # sin(2u)cos(3v) is an exact eigenfunction with eigenvalue -(4/a^2+9/b^2)
        def max_err(n):
            dom = FlatTorus2(a=1.0, b=2.0, n1=n, n2=n)
            U, V = dom.chart_grid()
            F = np.sin(2 * U) * np.cos(3 * V)
            lam = -(4.0 / 1.0**2 + 9.0 / 2.0**2)
            return np.max(np.abs(dom.laplace_beltrami(F) - lam * F))

        e64, e128 = max_err(64), max_err(128)
        assert e64 < 0.05
        assert e64 / e128 == pytest.approx(4.0, rel=0.05)

    def test_check_point_rejects_bad_input(self):
        dom = FlatTorus2(a=1, b=1, n1=16, n2=16)
        with pytest.raises(ChartDomainError):
            dom.check_point((np.nan, 0.0))


class TestRoundSphere:
    def test_metric_closed_form(self):
        dom = RoundSphere2(r=2.0, n1=16, n2=32)
        th = 1.1
        g = dom.metric_at((th, 0.5))
        np.testing.assert_allclose(g, np.diag([4.0, 4.0 * np.sin(th) ** 2]))

    def test_christoffel_against_metric_differences(self):
        dom = RoundSphere2(r=1.5, n1=32, n2=64)
        for p in interior_points(dom, 8):
            G = dom.christoffel_at(p)
            G_fd = christoffel_fd_at(dom, p, h=1e-5)
            np.testing.assert_allclose(G, G_fd, atol=1e-7)

    def test_ricci_against_christoffel_differences(self):
        dom = RoundSphere2(r=1.5, n1=32, n2=64)
        for p in interior_points(dom, 8):
            np.testing.assert_allclose(
                dom.ricci_at(p), ricci_fd_at(dom, p, h=1e-4), atol=1e-5
            )

    def test_ricci_is_metric_over_r2(self):
        dom = RoundSphere2(r=2.0, n1=16, n2=32)
        p = (1.0, 0.3)
        np.testing.assert_allclose(dom.ricci_at(p), dom.metric_at(p) / 4.0)

    def test_ricci_min_is_inverse_radius_squared(self):
        for r in (0.5, 1.0, 3.0):
            val, _ = ricci_min(RoundSphere2(r=r, n1=16, n2=32))
            assert val == pytest.approx(1.0 / r**2, rel=1e-10)

    def test_volume_converges_to_sphere_area(self):
        dom = RoundSphere2(r=1.0, n1=64, n2=128)
        assert dom.volume() == pytest.approx(4 * np.pi, rel=1e-3)

    def test_grid_avoids_poles(self):
        dom = RoundSphere2(r=1.0, n1=16, n2=32)
        th = dom.chart_grid()[0]
        assert th.min() > 0 and th.max() < np.pi

    def test_discrete_divergence_theorem(self):
        # the flux-form Laplacian sums to zero against the quadrature weights
        dom = RoundSphere2(r=1.0, n1=32, n2=64)
        rng = np.random.default_rng(3)
        F = rng.standard_normal((dom.n1, dom.n2))
        total = np.sum(dom.laplace_beltrami(F) * dom.quad_weight_grid())
        assert abs(total) < 1e-8 * np.max(np.abs(F))

    def test_divergence_theorem_on_torus(self):
        dom = FlatTorus2(a=1.0, b=2.0, n1=16, n2=24)
        rng = np.random.default_rng(4)
        F = rng.standard_normal((dom.n1, dom.n2))
        total = np.sum(dom.laplace_beltrami(F) * dom.quad_weight_grid())
        assert abs(total) < 1e-10

    def test_laplacian_of_spherical_harmonic(self):
        # cos(theta) is an l=1 eigenfunction: Lap = -2/r^2 cos(theta)
        dom = RoundSphere2(r=1.0, n1=64, n2=128)
        TH, _ = dom.chart_grid()
        F = np.cos(TH)
        err = np.max(np.abs(dom.laplace_beltrami(F) + 2 * F))
        assert err < 2e-3

    def test_pad_antipodal_wrap(self):
        # a rotationally symmetric smooth field stays smooth across the pole
        dom = RoundSphere2(r=1.0, n1=32, n2=64)
        TH, PH = dom.chart_grid()
        F = np.sin(TH) * np.cos(PH)
        Fp = dom.pad(F)
        # ghost row above the north pole equals the antipodally rolled row
        np.testing.assert_allclose(Fp[0, 1:-1], np.roll(F[0], dom.n2 // 2))

    def test_flagged_mask_covers_pole_collar(self):
        dom = RoundSphere2(r=1.0, n1=64, n2=128)
        TH, _ = dom.chart_grid()
        mask = dom.flagged_mask()
        assert mask[0].all() and mask[-1].all()
        assert not mask[dom.n1 // 2].any()
        assert np.all(TH[mask.any(axis=1)][:, 0] != TH[dom.n1 // 2, 0])

    def test_invalid_construction(self):
        with pytest.raises(UsageError):
            RoundSphere2(r=-1.0, n1=16, n2=32)
        with pytest.raises(UsageError):
            FlatTorus2(a=1.0, b=1.0, n1=2, n2=16)
