"""Domain manifolds as structured chart grids.

Two built-in compact surfaces: the flat 2-torus and the round 2-sphere.
Each carries a closed-form metric, Christoffel symbols and Ricci tensor
on a periodic (torus) or pole-staggered (sphere) node grid, plus the
finite-difference curvature paths used as cross-checks against the
closed forms.

Sphere grids stagger the latitude nodes so no node sits on a chart
pole; ghost rows continue fields across the pole antipodally, which
keeps all stencils central and O(h^2).  The two rows adjacent to the
poles are flagged so sup-norm diagnostics can exclude them.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ChartDomainError, UsageError
from .numerics import gen_eigvalsh

TWO_PI = 2.0 * np.pi


def _as_point(p):
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise UsageError(f"chart point must have 2 coordinates, got shape {p.shape}")
    return p


@dataclass(frozen=True)
class FlatTorus2:
    """Flat torus with chart (u, v) in [0, 2pi)^2 and metric diag(a^2, b^2)."""

    a: float = 1.0
    b: float = 1.0
    n1: int = 64
    n2: int = 64

    kind = "torus"
    n = 2  # intrinsic dimension

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise UsageError("torus periods must be positive")
        if self.n1 < 4 or self.n2 < 4:
            raise UsageError("torus grid needs at least 4 nodes per axis")

    # -- chart ---------------------------------------------------------------

    @property
    def spacing(self):
        return (TWO_PI / self.n1, TWO_PI / self.n2)

    def axes(self):
        h1, h2 = self.spacing
        return np.arange(self.n1) * h1, np.arange(self.n2) * h2

    def chart_grid(self):
        u, v = self.axes()
        return np.meshgrid(u, v, indexing="ij")

    def check_point(self, p):
        p = _as_point(p)
        if not (0.0 <= p[0] <= TWO_PI and 0.0 <= p[1] <= TWO_PI):
            raise ChartDomainError(f"point {p} outside torus chart [0, 2pi]^2")
        return p

    def with_resolution(self, n1, n2=None):
        return replace(self, n1=n1, n2=n2 if n2 is not None else n1)

    def descriptor(self):
        return f"torus:a={self.a:g},b={self.b:g}"

    # -- metric and curvature ------------------------------------------------

    def metric_at(self, p):
        self.check_point(p)
        return np.diag([self.a**2, self.b**2])

    def metric_diag_grid(self):
        g = np.empty((self.n1, self.n2, 2))
        g[..., 0] = self.a**2
        g[..., 1] = self.b**2
        return g

    def inv_metric_diag_grid(self):
        return 1.0 / self.metric_diag_grid()

    def metric_grid(self):
        gd = self.metric_diag_grid()
        g = np.zeros((self.n1, self.n2, 2, 2))
        g[..., 0, 0] = gd[..., 0]
        g[..., 1, 1] = gd[..., 1]
        return g

    def sqrt_det_grid(self):
        return np.full((self.n1, self.n2), self.a * self.b)

    def christoffel_at(self, p):
        self.check_point(p)
        return np.zeros((2, 2, 2))

    def christoffel_grid(self):
        return np.zeros((self.n1, self.n2, 2, 2, 2))

    def ricci_at(self, p):
        self.check_point(p)
        return np.zeros((2, 2))

    def ricci_grid(self):
        return np.zeros((self.n1, self.n2, 2, 2))

    # -- discrete calculus ---------------------------------------------------

    def pad(self, F):
        """One ghost layer on each side, periodic in both directions."""
        F = np.asarray(F)
        F = np.concatenate([F[-1:], F, F[:1]], axis=0)
        return np.concatenate([F[:, -1:], F, F[:, :1]], axis=1)

    def laplace_beltrami(self, F):
        """Conservative discrete Laplace-Beltrami of a node field."""
        F = np.asarray(F, dtype=float)
        h1, h2 = self.spacing
        Fp = self.pad(F)
        c = Fp[1:-1, 1:-1]
        d1 = (Fp[2:, 1:-1] - 2 * c + Fp[:-2, 1:-1]) / (self.a**2 * h1**2)
        d2 = (Fp[1:-1, 2:] - 2 * c + Fp[1:-1, :-2]) / (self.b**2 * h2**2)
        return d1 + d2

    def quad_weight_grid(self):
        h1, h2 = self.spacing
        return self.sqrt_det_grid() * h1 * h2

    def volume(self):
        return float(self.quad_weight_grid().sum())

    def flagged_mask(self):
        return np.zeros((self.n1, self.n2), dtype=bool)


@dataclass(frozen=True)
class RoundSphere2:
    """Round sphere of radius r, chart (theta, phi).

    Latitude nodes are staggered: theta_i = (i + 1/2) pi / n1, so the
    chart poles are never sampled.  n2 must be even so fields can be
    continued across the poles (the ghost row at -theta is the row at
    +theta with phi shifted by pi).
    """

    r: float = 1.0
    n1: int = 64
    n2: int = 128

    kind = "sphere"
    n = 2
    # chart-artifact collar: nodes with theta closer than this to a pole
    # are flagged; the 1/sin(theta) factors of the chart amplify O(h^2)
    # stencil errors to O(h) on any fixed number of rows, so the flag
    # has to cover a fixed angle rather than a fixed row count
    pole_collar = np.pi / 16

    def __post_init__(self):
        if self.r <= 0:
            raise UsageError("sphere radius must be positive")
        if self.n1 < 4 or self.n2 < 4:
            raise UsageError("sphere grid needs at least 4 nodes per axis")
        if self.n2 % 2 != 0:
            raise UsageError("sphere grid needs an even longitude count")

    # -- chart ---------------------------------------------------------------

    @property
    def spacing(self):
        return (np.pi / self.n1, TWO_PI / self.n2)

    def axes(self):
        h1, h2 = self.spacing
        theta = (np.arange(self.n1) + 0.5) * h1
        phi = np.arange(self.n2) * h2
        return theta, phi

    def chart_grid(self):
        theta, phi = self.axes()
        return np.meshgrid(theta, phi, indexing="ij")

    def check_point(self, p):
        p = _as_point(p)
        if not (0.0 < p[0] < np.pi):
            raise ChartDomainError(f"theta={p[0]} outside (0, pi)")
        if not (0.0 <= p[1] <= TWO_PI):
            raise ChartDomainError(f"phi={p[1]} outside [0, 2pi]")
        return p

    def with_resolution(self, n1, n2=None):
        return replace(self, n1=n1, n2=n2 if n2 is not None else 2 * n1)

    def descriptor(self):
        return f"sphere:r={self.r:g}"

    # -- metric and curvature ------------------------------------------------

    def metric_at(self, p):
        self.check_point(p)
        return np.diag([self.r**2, (self.r * np.sin(p[0])) ** 2])

    def metric_diag_grid(self):
        theta, _ = self.axes()
        g = np.empty((self.n1, self.n2, 2))
        g[..., 0] = self.r**2
        g[..., 1] = (self.r * np.sin(theta))[:, None] ** 2
        return g

    def inv_metric_diag_grid(self):
        return 1.0 / self.metric_diag_grid()

    def metric_grid(self):
        gd = self.metric_diag_grid()
        g = np.zeros((self.n1, self.n2, 2, 2))
        g[..., 0, 0] = gd[..., 0]
        g[..., 1, 1] = gd[..., 1]
        return g

    def sqrt_det_grid(self):
        theta, _ = self.axes()
        return np.broadcast_to(
            (self.r**2 * np.sin(theta))[:, None], (self.n1, self.n2)
        ).copy()

    def christoffel_at(self, p):
        p = self.check_point(p)
        th = p[0]
        G = np.zeros((2, 2, 2))  # G[k, i, j]
        G[0, 1, 1] = -np.sin(th) * np.cos(th)
        G[1, 0, 1] = G[1, 1, 0] = np.cos(th) / np.sin(th)
        return G

    def christoffel_grid(self):
        theta, _ = self.axes()
        G = np.zeros((self.n1, self.n2, 2, 2, 2))
        G[..., 0, 1, 1] = (-np.sin(theta) * np.cos(theta))[:, None]
        cot = (np.cos(theta) / np.sin(theta))[:, None]
        G[..., 1, 0, 1] = cot
        G[..., 1, 1, 0] = cot
        return G

    def ricci_at(self, p):
        # Ric = (n-1)/r^2 g with n = 2
        return self.metric_at(p) / self.r**2

    def ricci_grid(self):
        return self.metric_grid() / self.r**2

    # -- discrete calculus ---------------------------------------------------

    def pad(self, F):
        """Ghost layer: periodic in phi, antipodal continuation in theta."""
        F = np.asarray(F)
        half = self.n2 // 2
        top = np.roll(F[:1], half, axis=1)
        bot = np.roll(F[-1:], half, axis=1)
        F = np.concatenate([top, F, bot], axis=0)
        return np.concatenate([F[:, -1:], F, F[:, :1]], axis=1)

    def laplace_beltrami(self, F):
        """Conservative (flux-form) discrete Laplace-Beltrami.

        The theta fluxes carry sin(theta) at cell interfaces; the
        interface at each pole has sin = 0, so the discrete divergence
        theorem holds exactly.
        """
        F = np.asarray(F, dtype=float)
        h1, h2 = self.spacing
        theta, _ = self.axes()
        shape = (self.n1,) + (1,) * (F.ndim - 1)
        s = np.sin(theta).reshape(shape)
        s_up = np.sin(theta + h1 / 2).reshape(shape)
        s_dn = np.sin(theta - h1 / 2).reshape(shape)
        Fp = self.pad(F)
        c = Fp[1:-1, 1:-1]
        flux = s_up * (Fp[2:, 1:-1] - c) - s_dn * (c - Fp[:-2, 1:-1])
        d1 = flux / (self.r**2 * s * h1**2)
        sphi = np.sin(theta).reshape(shape)
        d2 = (Fp[1:-1, 2:] - 2 * c + Fp[1:-1, :-2]) / (self.r**2 * sphi**2 * h2**2)
        return d1 + d2

    def quad_weight_grid(self):
        h1, h2 = self.spacing
        return self.sqrt_det_grid() * h1 * h2

    def volume(self):
        return float(self.quad_weight_grid().sum())

    def flagged_mask(self):
        theta, _ = self.axes()
        rows = (theta < self.pole_collar) | (theta > np.pi - self.pole_collar)
        rows[0] = rows[-1] = True
        return np.broadcast_to(rows[:, None], (self.n1, self.n2)).copy()


# -- finite-difference curvature cross-checks --------------------------------


def christoffel_fd_at(domain, p, h=None):
    """Christoffel symbols from central differences of the metric.

    Cross-check path for the closed forms; O(h^2) in the step.
    """
    p = np.asarray(p, dtype=float)
    if h is None:
        h = min(domain.spacing)
    dg = np.empty((2, 2, 2))  # dg[l, i, j] = d_l g_ij
    for l in range(2):
        e = np.zeros(2)
        e[l] = h
        dg[l] = (domain.metric_at(p + e) - domain.metric_at(p - e)) / (2 * h)
    ginv = np.linalg.inv(domain.metric_at(p))
    G = np.empty((2, 2, 2))
    for k in range(2):
        for i in range(2):
            for j in range(2):
                G[k, i, j] = 0.5 * sum(
                    ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j])
                    for l in range(2)
                )
    return G


def ricci_fd_at(domain, p, h=None):
    """Ricci tensor from central differences of the closed-form connection.

    Ric_ab = d_m G^m_ab - d_a G^m_mb + G^m_ml G^l_ab - G^m_al G^l_mb.
    """
    p = np.asarray(p, dtype=float)
    if h is None:
        h = min(domain.spacing)
    dG = np.empty((2, 2, 2, 2))  # dG[c, k, i, j] = d_c G^k_ij
    for c in range(2):
        e = np.zeros(2)
        e[c] = h
        dG[c] = (domain.christoffel_at(p + e) - domain.christoffel_at(p - e)) / (2 * h)
    G = domain.christoffel_at(p)
    ric = np.empty((2, 2))
    for a in range(2):
        for b in range(2):
            t = 0.0
            for m in range(2):
                t += dG[m][m, a, b] - dG[a][m, m, b]
                for l in range(2):
                    t += G[m, m, l] * G[l, a, b] - G[m, a, l] * G[l, m, b]
            ric[a, b] = t
    return 0.5 * (ric + ric.T)


def ricci_min(domain, nodes=None):
    """Minimum over sample nodes of the least eigenvalue of g^{-1} Ric.

    Returns (value, witness chart point).  nodes defaults to all grid
    nodes; an explicitly empty sample set is a usage error.
    """
    if nodes is None:
        U, V = domain.chart_grid()
        pts = np.stack([U.ravel(), V.ravel()], axis=-1)
        g = domain.metric_grid().reshape(-1, 2, 2)
        ric = domain.ricci_grid().reshape(-1, 2, 2)
    else:
        pts = np.atleast_2d(np.asarray(nodes, dtype=float))
        if pts.size == 0:
            raise UsageError("ricci_min needs a nonempty sample set")
        g = np.stack([domain.metric_at(p) for p in pts])
        ric = np.stack([domain.ricci_at(p) for p in pts])
    lam = gen_eigvalsh(ric, g)[..., 0]
    k = int(np.argmin(lam))
    return float(lam[k]), pts[k]
