"""Embedded targets: projection, second fundamental form, sectional
curvature (with independent oracles), and the plane extremizer."""

import numpy as np
import pytest

from bochnerlab.errors import ChartDomainError, DegeneratePlaneError, UsageError
from bochnerlab.targets import (
    CurvatureSample,
    Ellipsoid,
    Euclidean,
    FlatTorusEmb,
    ProductSpheres,
    Sphere,
    gauss_sectional_fd,
    sec_max_over_region,
    sectional_batch,
    sectional_curvature,
    tangent_basis,
)

ALL_TARGETS = [
    Euclidean(m=3),
    Sphere(k=2, r=1.5),
    FlatTorusEmb(radii=(1.0, 0.7)),
    Ellipsoid(a=1.0, b=1.0, c=2.0),
    ProductSpheres(r1=1.0, r2=2.0),
]


def on_target_points(target, count=16, seed=0):
    rng = np.random.default_rng(seed)
    return target.sample_points(count, rng)


@pytest.mark.parametrize("target", ALL_TARGETS, ids=lambda t: t.kind)
class TestEmbeddingBasics:
    def test_sample_points_satisfy_constraint(self, target):
        q = on_target_points(target)
        assert np.max(target.constraint_residual(q)) < 1e-10

    def test_closest_point_is_idempotent(self, target):
        q = on_target_points(target)
        np.testing.assert_allclose(target.closest_point(q), q, atol=1e-9)

    def test_closest_point_lands_on_target(self, target):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((32, target.m)) * 1.5
        p = target.closest_point(x)
        assert np.max(target.constraint_residual(p)) < 1e-9

    def test_tangent_projector_is_projection(self, target):
        q = on_target_points(target)
        P = target.tangent_projector(q)
        np.testing.assert_allclose(P @ P, P, atol=1e-10)
        np.testing.assert_allclose(np.swapaxes(P, -1, -2), P, atol=1e-12)
        k = target.dim
        np.testing.assert_allclose(np.trace(P, axis1=-2, axis2=-1), k, atol=1e-9)

    def test_second_fundamental_is_normal_and_symmetric(self, target):
        q = on_target_points(target)
        P = target.tangent_projector(q)
        rng = np.random.default_rng(2)
        X = np.einsum("bij,bj->bi", P, rng.standard_normal(q.shape))
        Y = np.einsum("bij,bj->bi", P, rng.standard_normal(q.shape))
        A_xy = target.second_fundamental(q, X, Y)
        A_yx = target.second_fundamental(q, Y, X)
        np.testing.assert_allclose(A_xy, A_yx, atol=1e-10)
        tangential = np.einsum("bij,bj->bi", P, A_xy)
        assert np.max(np.abs(tangential)) < 1e-9


class TestSectionalOracles:
    def test_sphere_matches_constant_curvature(self):
        # Gauss-equation path against the closed form 1/r^2
        tgt = Sphere(k=2, r=2.0)
        q = on_target_points(tgt, 8)
        for qi in q:
            B = tangent_basis(tgt, qi)
            sec = sectional_curvature(tgt, qi, B[:, 0], B[:, 1])
            assert sec == pytest.approx(0.25, abs=1e-8)

    def test_flat_torus_curvature_vanishes(self):
        tgt = FlatTorusEmb(radii=(1.0, 0.7))
        q = on_target_points(tgt, 8)
        for qi in q:
            B = tangent_basis(tgt, qi)
            sec = sectional_curvature(tgt, qi, B[:, 0], B[:, 1])
            assert sec == pytest.approx(0.0, abs=1e-10)

    def test_ellipsoid_gauss_curvature_closed_form(self):
        # independent oracle: K = 1/(a^2 b^2 c^2 h^4) with
        # h^2 = x^2/a^4 + y^2/b^4 + z^2/c^4 (support-function formula)
        a, b, c = 1.0, 1.0, 2.0
        tgt = Ellipsoid(a=a, b=b, c=c)
        q = on_target_points(tgt, 16, seed=5)
        h2 = q[:, 0] ** 2 / a**4 + q[:, 1] ** 2 / b**4 + q[:, 2] ** 2 / c**4
        K_oracle = 1.0 / (a**2 * b**2 * c**2 * h2**2)
        for qi, Ki in zip(q, K_oracle):
            B = tangent_basis(tgt, qi)
            sec = sectional_curvature(tgt, qi, B[:, 0], B[:, 1])
            assert sec == pytest.approx(Ki, rel=1e-9)

    def test_gauss_path_agrees_with_projector_differences(self):
        # second fundamental form recomputed from finite differences of
        # the tangent projector field, no analytic shape operator
        for tgt in (Sphere(k=2, r=1.5), Ellipsoid(a=1, b=1, c=2)):
            q = on_target_points(tgt, 6, seed=7)
            for qi in q:
                B = tangent_basis(tgt, qi)
                s1 = sectional_curvature(tgt, qi, B[:, 0], B[:, 1])
                s2 = gauss_sectional_fd(tgt, qi, B[:, 0], B[:, 1])
                assert s1 == pytest.approx(s2, abs=1e-5)

    def test_product_spheres_range(self):
        # sec on S^2(r1) x S^2(r2) lies in [0, 1/min(r1,r2)^2]; mixed
        # planes are flat, pure factor planes attain 1/r^2
        tgt = ProductSpheres(r1=1.0, r2=2.0)
        q = on_target_points(tgt, 8, seed=3)
        rng = np.random.default_rng(8)
        P = tgt.tangent_projector(q)
        for _ in range(50):
            X = np.einsum("bij,bj->bi", P, rng.standard_normal(q.shape))
            Y = np.einsum("bij,bj->bi", P, rng.standard_normal(q.shape))
            sec = sectional_batch(tgt, q, X, Y)
            assert np.all(sec >= -1e-10)
            assert np.all(sec <= 1.0 + 1e-10)
        # a pure first-factor plane attains the maximum
        q0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 2.0])
        X = np.array([0.0, 1.0, 0.0, 0.0, 0.0, 0.0])
        Y = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
        assert sectional_curvature(tgt, q0, X, Y) == pytest.approx(1.0, abs=1e-12)
        # a mixed plane is flat
        Z = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 0.0])
        assert sectional_curvature(tgt, q0, X, Z) == pytest.approx(0.0, abs=1e-12)

    def test_basis_invariance(self):
        # the sectional value only depends on the spanned plane
        tgt = Ellipsoid(a=1, b=1, c=2)
        q = on_target_points(tgt, 4, seed=11)
        rng = np.random.default_rng(12)
        for qi in q:
            B = tangent_basis(tgt, qi)
            X, Y = B[:, 0], B[:, 1]
            s0 = sectional_curvature(tgt, qi, X, Y)
            for _ in range(5):
                M = rng.standard_normal((2, 2))
                while abs(np.linalg.det(M)) < 0.1:
                    M = rng.standard_normal((2, 2))
                Xp = M[0, 0] * X + M[0, 1] * Y
                Yp = M[1, 0] * X + M[1, 1] * Y
                assert sectional_curvature(tgt, qi, Xp, Yp) == pytest.approx(
                    s0, rel=1e-9
                )

    def test_degenerate_plane_rejected(self):
        tgt = Sphere(k=2, r=1.0)
        q = np.array([0.0, 0.0, 1.0])
        X = np.array([1.0, 0.0, 0.0])
        with pytest.raises(DegeneratePlaneError):
            sectional_curvature(tgt, q, X, 2.0 * X)

    def test_off_target_point_rejected(self):
        tgt = Sphere(k=2, r=1.0)
        q = np.array([0.0, 0.0, 2.0])
        with pytest.raises(ChartDomainError):
            sectional_curvature(
                tgt, q, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])
            )


class TestSecMaxExtremizer:
    def test_sphere_constant(self):
        tgt = Sphere(k=2, r=2.0)
        pts = on_target_points(tgt, 32)
        val, sample = sec_max_over_region(tgt, pts)
        assert val == pytest.approx(0.25, abs=1e-12)
        assert isinstance(sample, CurvatureSample)

    def test_ellipsoid_pole_vs_equator(self):
        tgt = Ellipsoid(a=1, b=1, c=2)
        pole = np.array([[0.0, 0.0, 2.0]])
        equator = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        v_pole, _ = sec_max_over_region(tgt, pole)
        v_eq, _ = sec_max_over_region(tgt, equator)
        assert v_pole == pytest.approx(4.0, rel=1e-6)
        assert v_eq == pytest.approx(0.25, rel=1e-6)

    def test_monotone_under_inclusion(self):
        tgt = Ellipsoid(a=1, b=1, c=2)
        rng = np.random.default_rng(0)
        pts = tgt.sample_points(64, rng)
        small, _ = sec_max_over_region(tgt, pts[:16], seed=0)
        large, _ = sec_max_over_region(tgt, pts, seed=0)
        assert large >= small

    def test_deterministic(self):
        tgt = ProductSpheres(r1=1.0, r2=2.0)
        pts = on_target_points(tgt, 32, seed=9)
        v1, s1 = sec_max_over_region(tgt, pts, seed=4)
        v2, s2 = sec_max_over_region(tgt, pts, seed=4)
        assert v1 == v2
        np.testing.assert_array_equal(s1.X, s2.X)

    def test_empty_region_rejected(self):
        tgt = Sphere(k=2, r=1.0)
        with pytest.raises(UsageError):
            sec_max_over_region(tgt, np.empty((0, 3)))


class TestConstruction:
    def test_invalid_parameters(self):
        with pytest.raises(UsageError):
            Sphere(k=2, r=-1.0)
        with pytest.raises(UsageError):
            Ellipsoid(a=0.0, b=1.0, c=1.0)
        with pytest.raises(UsageError):
            FlatTorusEmb(radii=())

    def test_descriptors_round_trip(self):
        from bochnerlab.catalog import parse_target

        for tgt in ALL_TARGETS:
            again = parse_target(tgt.descriptor())
            assert again.descriptor() == tgt.descriptor()
