"""Target manifolds as isometrically embedded submanifolds of R^m.

Every target exposes a tangent projector P(q), a closest-point map onto
the submanifold, and an analytic second fundamental form A(X, Y).
Ambient space is flat, so sectional curvature comes from the Gauss
equation

    <R(X, Y) Y, X> = <A(X, X), A(Y, Y)> - |A(X, Y)|^2,

with closed-form overrides for the constant-curvature kinds.  The
region extremizer max Sec over all 2-planes based at a point set uses
per-point randomized plane sampling plus local ascent on the
Grassmannian; the per-point search is a deterministic function of the
point and the seed, which makes the maximum monotone under set
inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import (
    ChartDomainError,
    DegeneratePlaneError,
    NumericalError,
    UsageError,
)
from .numerics import orthonormal_pair, point_seed

ON_TARGET_TOL = 1e-8


@dataclass(frozen=True)
class CurvatureSample:
    """A sectional-curvature evaluation: base point, orthonormal plane, value."""

    point: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    value: float


@dataclass(frozen=True)
class Euclidean:
    """Flat R^m."""

    m: int = 3

    kind = "euclid"
    constant_sec = 0.0

    def __post_init__(self):
        if self.m < 2:
            raise UsageError("ambient dimension must be at least 2")

    @property
    def dim(self):
        return self.m

    def descriptor(self):
        return f"euclid:m={self.m}"

    def constraint_residual(self, q):
        q = np.asarray(q, dtype=float)
        return np.zeros(q.shape[:-1])

    def closest_point(self, x):
        return np.asarray(x, dtype=float).copy()

    def tangent_projector(self, q):
        q = np.asarray(q, dtype=float)
        return np.broadcast_to(np.eye(self.m), q.shape[:-1] + (self.m, self.m)).copy()

    def second_fundamental(self, q, X, Y):
        X = np.asarray(X, dtype=float)
        return np.zeros(np.broadcast_shapes(X.shape, np.shape(Y)))

    def sample_points(self, count, rng):
        return rng.standard_normal((count, self.m))


@dataclass(frozen=True)
class Sphere:
    """Round k-sphere of radius r embedded in R^{k+1}."""

    k: int = 2
    r: float = 1.0

    kind = "sphere"

    def __post_init__(self):
        if self.k < 2:
            raise UsageError("sphere dimension must be at least 2")
        if self.r <= 0:
            raise UsageError("sphere radius must be positive")

    @property
    def m(self):
        return self.k + 1

    @property
    def dim(self):
        return self.k

    @property
    def constant_sec(self):
        return 1.0 / self.r**2

    def descriptor(self):
        return f"sphere:r={self.r:g}"

    def constraint_residual(self, q):
        q = np.asarray(q, dtype=float)
        return np.abs(np.sum(q * q, axis=-1) - self.r**2)

    def closest_point(self, x):
        x = np.asarray(x, dtype=float)
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        if np.any(nrm < 1e-14):
            raise NumericalError("closest-point map undefined at the origin")
        return self.r * x / nrm

    def tangent_projector(self, q):
        q = np.asarray(q, dtype=float)
        eye = np.eye(self.m)
        return eye - q[..., :, None] * q[..., None, :] / self.r**2

    def second_fundamental(self, q, X, Y):
        q = np.asarray(q, dtype=float)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        return -np.sum(X * Y, axis=-1)[..., None] * q / self.r**2

    def sample_points(self, count, rng):
        return self.closest_point(rng.standard_normal((count, self.m)))


@dataclass(frozen=True)
class FlatTorusEmb:
    """Product of k circles of radii rho_i, embedded in R^{2k}.  Flat."""

    radii: tuple = (1.0, 1.0)

    kind = "torusemb"
    constant_sec = 0.0

    def __post_init__(self):
        if len(self.radii) < 2:
            raise UsageError("embedded torus needs at least 2 circle factors")
        if any(r <= 0 for r in self.radii):
            raise UsageError("circle radii must be positive")

    @property
    def k(self):
        return len(self.radii)

    @property
    def m(self):
        return 2 * self.k

    @property
    def dim(self):
        return self.k

    def descriptor(self):
        inner = ",".join(f"rho{i + 1}={r:g}" for i, r in enumerate(self.radii))
        return f"torusemb:{inner}"

    def _pairs(self, q):
        return np.asarray(q, dtype=float).reshape(q.shape[:-1] + (self.k, 2))

    def constraint_residual(self, q):
        p = self._pairs(np.asarray(q, dtype=float))
        res = np.abs(np.sum(p * p, axis=-1) - np.square(self.radii))
        return np.max(res, axis=-1)

    def closest_point(self, x):
        x = np.asarray(x, dtype=float)
        p = self._pairs(x)
        nrm = np.linalg.norm(p, axis=-1, keepdims=True)
        if np.any(nrm < 1e-14):
            raise NumericalError("closest-point map undefined at a circle axis")
        p = p * (np.asarray(self.radii)[:, None] / nrm)
        return p.reshape(x.shape)

    def tangent_projector(self, q):
        q = np.asarray(q, dtype=float)
        p = self._pairs(q)
        rho2 = np.square(self.radii)
        P = np.zeros(q.shape[:-1] + (self.m, self.m))
        for i in range(self.k):
            s = slice(2 * i, 2 * i + 2)
            blk = np.eye(2) - p[..., i, :, None] * p[..., i, None, :] / rho2[i]
            P[..., s, s] = blk
        return P

    def second_fundamental(self, q, X, Y):
        q = np.asarray(q, dtype=float)
        shape = np.broadcast_shapes(np.shape(X), np.shape(Y), q.shape)
        Xp = self._pairs(np.broadcast_to(np.asarray(X, float), shape))
        Yp = self._pairs(np.broadcast_to(np.asarray(Y, float), shape))
        qp = self._pairs(np.broadcast_to(q, shape))
        rho2 = np.square(self.radii)
        A = -np.sum(Xp * Yp, axis=-1)[..., None] * qp / rho2[:, None]
        return A.reshape(shape)

    def sample_points(self, count, rng):
        ang = rng.uniform(0, 2 * np.pi, size=(count, self.k))
        p = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
        p *= np.asarray(self.radii)[:, None]
        return p.reshape(count, self.m)


@dataclass(frozen=True)
class Ellipsoid:
    """Surface x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 in R^3."""

    a: float = 1.0
    b: float = 1.0
    c: float = 2.0

    kind = "ellipsoid"
    constant_sec = None
    m = 3
    dim = 2

    def __post_init__(self):
        if min(self.a, self.b, self.c) <= 0:
            raise UsageError("ellipsoid semi-axes must be positive")

    @property
    def k(self):
        return 2

    def descriptor(self):
        return f"ellipsoid:a={self.a:g},b={self.b:g},c={self.c:g}"

    @property
    def _w(self):
        return np.array([self.a, self.b, self.c], dtype=float) ** -2

    def constraint_residual(self, q):
        q = np.asarray(q, dtype=float)
        return np.abs(np.sum(self._w * q * q, axis=-1) - 1.0)

    def closest_point(self, x, max_iter=50, tol=1e-13):
        """Euclidean closest point via Newton on the Lagrange multiplier.

        Stationarity gives x_i = p_i / (1 + mu w_i); mu solves
        sum w_i p_i^2 / (1 + mu w_i)^2 = 1.  Valid inside the
        projection tube around the surface.
        """
        p = np.asarray(x, dtype=float)
        w = self._w
        mu = np.zeros(p.shape[:-1])
        lo = -0.9 / w.max()
        for _ in range(max_iter):
            d = 1.0 + mu[..., None] * w
            phi = np.sum(w * p * p / d**2, axis=-1) - 1.0
            if np.all(np.abs(phi) < tol):
                break
            dphi = -2.0 * np.sum(w**2 * p * p / d**3, axis=-1)
            mu = np.maximum(mu - phi / dphi, lo)
        else:
            d = 1.0 + mu[..., None] * w
            phi = np.sum(w * p * p / d**2, axis=-1) - 1.0
            if np.any(np.abs(phi) > 1e-10):
                raise NumericalError("ellipsoid projection did not converge")
        return p / (1.0 + mu[..., None] * w)

    def _unit_normal(self, q):
        q = np.asarray(q, dtype=float)
        grad = self._w * q
        return grad / np.linalg.norm(grad, axis=-1, keepdims=True)

    def tangent_projector(self, q):
        n = self._unit_normal(q)
        return np.eye(3) - n[..., :, None] * n[..., None, :]

    def second_fundamental(self, q, X, Y):
        # A(X, Y) = -n <W X, Y> / |W q| for tangent X, Y
        q = np.asarray(q, dtype=float)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        w = self._w
        grad_norm = np.linalg.norm(w * q, axis=-1)
        n = self._unit_normal(q)
        coef = -np.sum(w * X * Y, axis=-1) / grad_norm
        return coef[..., None] * n

    def sample_points(self, count, rng):
        u = rng.standard_normal((count, 3))
        u /= np.linalg.norm(u, axis=-1, keepdims=True)
        return u * np.array([self.a, self.b, self.c])


@dataclass(frozen=True)
class ProductSpheres:
    """S^2(r1) x S^2(r2) embedded in R^6 with the product metric."""

    r1: float = 1.0
    r2: float = 2.0

    kind = "prodspheres"
    constant_sec = None
    m = 6
    dim = 4

    def __post_init__(self):
        if self.r1 <= 0 or self.r2 <= 0:
            raise UsageError("sphere radii must be positive")

    @property
    def k(self):
        return 4

    def descriptor(self):
        return f"prodspheres:r1={self.r1:g},r2={self.r2:g}"

    def _factors(self):
        return Sphere(2, self.r1), Sphere(2, self.r2)

    def constraint_residual(self, q):
        q = np.asarray(q, dtype=float)
        s1, s2 = self._factors()
        return np.maximum(
            s1.constraint_residual(q[..., :3]), s2.constraint_residual(q[..., 3:])
        )

    def closest_point(self, x):
        x = np.asarray(x, dtype=float)
        s1, s2 = self._factors()
        return np.concatenate(
            [s1.closest_point(x[..., :3]), s2.closest_point(x[..., 3:])], axis=-1
        )

    def tangent_projector(self, q):
        q = np.asarray(q, dtype=float)
        s1, s2 = self._factors()
        P = np.zeros(q.shape[:-1] + (6, 6))
        P[..., :3, :3] = s1.tangent_projector(q[..., :3])
        P[..., 3:, 3:] = s2.tangent_projector(q[..., 3:])
        return P

    def second_fundamental(self, q, X, Y):
        q = np.asarray(q, dtype=float)
        X = np.asarray(X, dtype=float)
        Y = np.asarray(Y, dtype=float)
        s1, s2 = self._factors()
        return np.concatenate(
            [
                s1.second_fundamental(q[..., :3], X[..., :3], Y[..., :3]),
                s2.second_fundamental(q[..., 3:], X[..., 3:], Y[..., 3:]),
            ],
            axis=-1,
        )

    def sample_points(self, count, rng):
        s1, s2 = self._factors()
        return np.concatenate(
            [s1.sample_points(count, rng), s2.sample_points(count, rng)], axis=-1
        )


TARGET_KINDS = (Euclidean, Sphere, FlatTorusEmb, Ellipsoid, ProductSpheres)


# -- sectional curvature -----------------------------------------------------


def _gauss_numerator(target, q, X, Y):
    """<R(X, Y) Y, X> from the Gauss equation with the analytic A."""
    Axx = target.second_fundamental(q, X, X)
    Ayy = target.second_fundamental(q, Y, Y)
    Axy = target.second_fundamental(q, X, Y)
    return np.sum(Axx * Ayy, axis=-1) - np.sum(Axy * Axy, axis=-1)


def sectional_batch(target, q, X, Y):
    """Sectional curvature of span(X, Y) at q, batched, no validity checks.

    X, Y need not be orthonormal; degenerate pairs yield nan.
    """
    if target.constant_sec is not None:
        X = np.asarray(X, dtype=float)
        shape = np.broadcast_shapes(X.shape[:-1], np.shape(Y)[:-1])
        return np.full(shape, target.constant_sec)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    gram = (
        np.sum(X * X, axis=-1) * np.sum(Y * Y, axis=-1)
        - np.sum(X * Y, axis=-1) ** 2
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        return _gauss_numerator(target, q, X, Y) / gram


def sectional_curvature(target, q, X, Y):
    """Sectional curvature of the 2-plane span(X, Y) at an on-target point."""
    q = np.asarray(q, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    res = float(target.constraint_residual(q))
    if res > ON_TARGET_TOL:
        raise ChartDomainError(f"base point off target (residual {res:.3e})")
    gram = float(
        np.dot(X, X) * np.dot(Y, Y) - np.dot(X, Y) ** 2
    )
    if gram < 1e-14:
        raise DegeneratePlaneError("vectors do not span a 2-plane")
    if target.constant_sec is not None:
        return float(target.constant_sec)
    return float(_gauss_numerator(target, q, X, Y) / gram)


def gauss_sectional_fd(target, q, X, Y, eps=1e-5):
    """Gauss-equation sectional value with A from finite differences of P.

    A(X, Y) = (I - P) (D_X P) Y, with D_X P differenced along the
    projected curve through q.  Independent of the analytic A; used as
    a cross-check.
    """
    q = np.asarray(q, dtype=float)
    P = target.tangent_projector(q)
    N = np.eye(target.m) - P

    def A(U, V):
        dP = (
            target.tangent_projector(target.closest_point(q + eps * U))
            - target.tangent_projector(target.closest_point(q - eps * U))
        ) / (2 * eps)
        return N @ (dP @ V)

    num = float(A(X, X) @ A(Y, Y) - A(X, Y) @ A(X, Y))
    gram = float(np.dot(X, X) * np.dot(Y, Y) - np.dot(X, Y) ** 2)
    if gram < 1e-14:
        raise DegeneratePlaneError("vectors do not span a 2-plane")
    return num / gram


def tangent_basis(target, q):
    """Orthonormal basis of T_q as columns of an (..., m, k) array."""
    P = target.tangent_projector(q)
    evals, evecs = np.linalg.eigh(P)
    # projector eigenvalues are 0/1; tangent directions are the top k
    return evecs[..., -target.dim:]


# -- region extremizer -------------------------------------------------------


def _sample_and_ascend(target, pts, planes, steps, seed, cands=4):
    """Deterministic per-point plane search; returns (values, frames)."""
    B, m = pts.shape
    P = target.tangent_projector(pts)
    delta0, shrink = 0.4, 0.845

    raw_pl = np.empty((B, planes, m, 2))
    raw_st = np.empty((B, steps, cands, m, 2))
    for b in range(B):
        rng = np.random.default_rng(point_seed(pts[b], seed))
        raw_pl[b] = rng.standard_normal((planes, m, 2))
        raw_st[b] = rng.standard_normal((steps, cands, m, 2))

    def project(Z):
        return np.einsum("bij,b...j->b...i", P, Z)

    Xs, Ys, ok = orthonormal_pair(
        project(raw_pl[..., 0]), project(raw_pl[..., 1])
    )
    vals = sectional_batch(target, pts[:, None], Xs, Ys)
    vals = np.where(ok, vals, -np.inf)
    best = np.argmax(vals, axis=1)
    idx = np.arange(B)
    cur_v = vals[idx, best]
    cur_X = Xs[idx, best]
    cur_Y = Ys[idx, best]

    for t in range(steps):
        d = delta0 * shrink**t
        Z1 = project(raw_st[:, t, ..., 0])
        Z2 = project(raw_st[:, t, ..., 1])
        Xc, Yc, ok = orthonormal_pair(cur_X[:, None] + d * Z1, cur_Y[:, None] + d * Z2)
        v = sectional_batch(target, pts[:, None], Xc, Yc)
        v = np.where(ok, v, -np.inf)
        k = np.argmax(v, axis=1)
        vk = v[idx, k]
        take = vk > cur_v
        cur_v = np.where(take, vk, cur_v)
        cur_X = np.where(take[:, None], Xc[idx, k], cur_X)
        cur_Y = np.where(take[:, None], Yc[idx, k], cur_Y)
    return cur_v, cur_X, cur_Y


def _polish_plane(target, q, X0, Y0):
    """Local maximization of Sec over frames at a fixed base point."""
    P = target.tangent_projector(q)
    m = target.m

    def negsec(z):
        X = P @ z[:m]
        Y = P @ z[m:]
        Xh, Yh, ok = orthonormal_pair(X, Y)
        if not ok:
            return 1e6
        return -float(sectional_batch(target, q, Xh, Yh))

    res = optimize.minimize(
        negsec,
        np.concatenate([X0, Y0]),
        method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
    )
    X = P @ res.x[:m]
    Y = P @ res.x[m:]
    Xh, Yh, ok = orthonormal_pair(X, Y)
    if not ok:
        return -np.inf, X0, Y0
    return -res.fun, Xh, Yh


def sec_max_over_region(
    target, points, planes=512, ascent_steps=50, seed=0, polish=True, chunk=512
):
    """Maximum sectional curvature over all 2-planes at the given points.

    Returns (value, CurvatureSample witness).  The per-point search is
    deterministic given the point and the seed, so enlarging the point
    set can only increase the result.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise UsageError("sec_max_over_region needs a nonempty point set")
    if pts.shape[-1] != target.m:
        raise UsageError(
            f"points have ambient dimension {pts.shape[-1]}, expected {target.m}"
        )
    res = target.constraint_residual(pts)
    if np.max(res) > ON_TARGET_TOL:
        raise ChartDomainError(
            f"point set contains off-target points (max residual {np.max(res):.3e})"
        )

    if target.constant_sec is not None:
        q = pts[0]
        T = tangent_basis(target, q)
        sample = CurvatureSample(q, T[:, 0], T[:, 1], float(target.constant_sec))
        return float(target.constant_sec), sample

    if target.dim == 2:
        # one tangent plane per point: the extremizer is a pointwise max
        T = tangent_basis(target, pts)
        X, Y = T[..., 0], T[..., 1]
        vals = sectional_batch(target, pts, X, Y)
        b = int(np.argmax(vals))
        sample = CurvatureSample(pts[b], X[b], Y[b], float(vals[b]))
        return float(vals[b]), sample

    best_v = -np.inf
    best = None
    for lo in range(0, pts.shape[0], chunk):
        sub = pts[lo : lo + chunk]
        v, X, Y = _sample_and_ascend(target, sub, planes, ascent_steps, seed)
        b = int(np.argmax(v))
        if v[b] > best_v:
            best_v = float(v[b])
            best = (sub[b], X[b], Y[b])
    q, X, Y = best
    if polish:
        pv, pX, pY = _polish_plane(target, q, X, Y)
        if pv > best_v:
            best_v, X, Y = float(pv), pX, pY
    return best_v, CurvatureSample(q, X, Y, best_v)
