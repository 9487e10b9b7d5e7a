"""Discrete maps between a domain grid and an embedded target.

A map is its grid of ambient target values.  First- and second-order
data (Jacobian, pullback spectrum, tension, second fundamental form of
the map) come from central differences on the chart grid followed by
tangent projection at the image point.  All stencils are second order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .catalog import parse_descriptor, parse_domain, parse_target
from .domains import FlatTorus2, RoundSphere2
from .errors import UsageError
from .numerics import fmt17, gen_eigh

VALUE_TOL = 1e-10


@dataclass(frozen=True)
class DiscreteMap:
    """Map f: domain -> target sampled on the domain grid.

    values has shape (n1, n2, m) and always lies on the target: the
    constructor reprojects through the closest-point map.
    """

    domain: object
    target: object
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.domain.n1, self.domain.n2, self.target.m):
            raise UsageError(
                f"value grid shape {v.shape} does not match "
                f"({self.domain.n1}, {self.domain.n2}, {self.target.m})"
            )
        v = self.target.closest_point(v)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def with_values(self, values):
        return DiscreteMap(self.domain, self.target, values)

    def max_constraint_residual(self):
        return float(np.max(self.target.constraint_residual(self.values)))


# -- analytic map catalog ----------------------------------------------------


def _unit_directions(domain):
    if not isinstance(domain, RoundSphere2):
        raise UsageError("this catalog map needs a sphere domain")
    TH, PH = domain.chart_grid()
    s = np.sin(TH)
    return np.stack([s * np.cos(PH), s * np.sin(PH), np.cos(TH)], axis=-1)


def default_basepoint(target):
    """A canonical on-target point, used by the constant map."""
    kind = target.kind
    if kind == "euclid":
        return np.zeros(target.m)
    if kind == "sphere":
        q = np.zeros(target.m)
        q[-1] = target.r
        return q
    if kind == "ellipsoid":
        return np.array([0.0, 0.0, target.c])
    if kind == "torusemb":
        q = np.zeros(target.m)
        for i, r in enumerate(target.radii):
            q[2 * i] = r
        return q
    if kind == "prodspheres":
        return np.array([0.0, 0.0, target.r1, 0.0, 0.0, target.r2])
    raise UsageError(f"no default basepoint for target kind {kind!r}")


def constant_map(domain, target, q0=None):
    q0 = default_basepoint(target) if q0 is None else np.asarray(q0, dtype=float)
    vals = np.broadcast_to(q0, (domain.n1, domain.n2, target.m)).copy()
    return DiscreteMap(domain, target, vals)


def radial_scaling_map(domain, target):
    """Sphere chart point -> same direction on the target sphere.

    A homothety with factor (r_target / r_domain)^2 on the pullback
    spectrum; the identity map when the radii agree.
    """
    if target.kind != "sphere" or target.m != 3:
        raise UsageError("radial scaling needs a 2-sphere target in R^3")
    return DiscreteMap(domain, target, target.r * _unit_directions(domain))


def identity_sphere_map(domain, target):
    if target.kind != "sphere" or abs(target.r - domain.r) > 1e-12:
        raise UsageError("identity map needs matching sphere radii")
    return radial_scaling_map(domain, target)


def holomorphic_map(domain, target, k):
    """Degree-k power map of the sphere in a stereographic coordinate."""
    k = int(k)
    if k < 1:
        raise UsageError("holomorphic degree must be a positive integer")
    if target.kind != "sphere" or target.m != 3:
        raise UsageError("holomorphic map needs a 2-sphere target in R^3")
    TH, PH = domain.chart_grid()
    t = np.tan(TH / 2.0)
    w = t**k  # |z|^k; the staggered grid keeps t finite
    denom = 1.0 + w * w
    sin_tp = 2.0 * w / denom
    cos_tp = (1.0 - w * w) / denom
    vals = target.r * np.stack(
        [sin_tp * np.cos(k * PH), sin_tp * np.sin(k * PH), cos_tp], axis=-1
    )
    return DiscreteMap(domain, target, vals)


def cap_map(domain, target, amplitude):
    """Torus into a small geodesic cap around the north pole of a sphere.

    The image lies in the geodesic ball of radius `amplitude` around
    the basepoint; the map is not harmonic.
    """
    if not isinstance(domain, FlatTorus2):
        raise UsageError("cap map needs a torus domain")
    if target.kind != "sphere" or target.m != 3:
        raise UsageError("cap map needs a 2-sphere target in R^3")
    if not (0 < amplitude < np.pi / 2):
        raise UsageError("cap amplitude must lie in (0, pi/2)")
    U, V = domain.chart_grid()
    s = amplitude / np.sqrt(2.0)
    disp = np.stack([s * np.sin(U), s * np.sin(V), np.zeros_like(U)], axis=-1)
    q0 = np.array([0.0, 0.0, 1.0])
    vals = target.r * _normalize(q0 + disp)
    return DiscreteMap(domain, target, vals)


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def catalog_map(name, domain, target):
    """Build a catalog map from a descriptor such as 'holomorphic:k=2'."""
    kind, params = parse_descriptor(name)
    if kind == "constant":
        if params:
            raise UsageError("constant map takes no descriptor keys")
        return constant_map(domain, target)
    if kind == "identity":
        if params:
            raise UsageError("identity map takes no descriptor keys")
        return identity_sphere_map(domain, target)
    if kind == "scaling":
        if params:
            raise UsageError("scaling map takes no descriptor keys")
        return radial_scaling_map(domain, target)
    if kind == "holomorphic":
        k = params.pop("k", 2.0)
        if params:
            raise UsageError(f"unknown keys {sorted(params)} for holomorphic map")
        return holomorphic_map(domain, target, k)
    if kind == "cap":
        amp = params.pop("amplitude", 0.3)
        if params:
            raise UsageError(f"unknown keys {sorted(params)} for cap map")
        return cap_map(domain, target, amp)
    raise UsageError(f"unknown catalog map {kind!r}")


def analytic_scaling_jacobian(domain, r_target):
    """Closed-form Jacobian of the radial scaling map (oracle for tests)."""
    TH, PH = domain.chart_grid()
    ct, st = np.cos(TH), np.sin(TH)
    cp, sp = np.cos(PH), np.sin(PH)
    d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    d_phi = np.stack([-st * sp, st * cp, np.zeros_like(TH)], axis=-1)
    return r_target * np.stack([d_theta, d_phi], axis=-1)


# -- finite differences ------------------------------------------------------


def _d1(domain, F, axis):
    h1, h2 = domain.spacing
    Fp = domain.pad(F)
    if axis == 0:
        return (Fp[2:, 1:-1] - Fp[:-2, 1:-1]) / (2 * h1)
    return (Fp[1:-1, 2:] - Fp[1:-1, :-2]) / (2 * h2)


def _d2(domain, F, axis):
    h1, h2 = domain.spacing
    Fp = domain.pad(F)
    c = Fp[1:-1, 1:-1]
    if axis == 0:
        return (Fp[2:, 1:-1] - 2 * c + Fp[:-2, 1:-1]) / h1**2
    return (Fp[1:-1, 2:] - 2 * c + Fp[1:-1, :-2]) / h2**2


def jacobian_field(f):
    """Tangent-projected chart Jacobian, shape (n1, n2, m, 2)."""
    du = _d1(f.domain, f.values, 0)
    dv = _d1(f.domain, f.values, 1)
    J = np.stack([du, dv], axis=-1)
    P = f.target.tangent_projector(f.values)
    return P @ J


def pullback_field(f, J=None):
    if J is None:
        J = jacobian_field(f)
    return np.swapaxes(J, -1, -2) @ J


def spectrum_fields(f, J=None):
    """(lam desc, S, e) fields from the pullback metric.

    lam are the eigenvalues of g^{-1} f*gbar, clamped at zero; S is
    their sum (= |df|^2) and e = S / 2.
    """
    P = pullback_field(f, J)
    g = f.domain.metric_grid()
    lam, _ = gen_eigh(P, g)
    lam = np.where(lam > -1e-12, np.maximum(lam, 0.0), lam)[..., ::-1]
    S = lam.sum(axis=-1)
    return lam, S, S / 2.0


def energy_density_field(f, J=None):
    """e = trace_g(f*gbar) / 2 without an eigensolve."""
    if J is None:
        J = jacobian_field(f)
    ginv = f.domain.inv_metric_diag_grid()
    S = sum(ginv[..., d] * np.sum(J[..., :, d] ** 2, axis=-1) for d in range(2))
    return S / 2.0


def total_energy(f):
    """Quadrature of the energy density over the domain."""
    e = energy_density_field(f)
    return float(np.sum(e * f.domain.quad_weight_grid()))


def laplacian_scalar(domain, field, node=None):
    """Discrete Laplace-Beltrami of a scalar node field."""
    lap = domain.laplace_beltrami(np.asarray(field, dtype=float))
    if node is None:
        return lap
    return float(lap[node])


def tension_field(f):
    """Tension tau = tangential part of the componentwise Laplace-Beltrami."""
    lap = f.domain.laplace_beltrami(f.values)
    P = f.target.tangent_projector(f.values)
    return np.einsum("...ab,...b->...a", P, lap)


def hessian_field(f):
    """Second fundamental form of the map and its squared norm.

    Returns (H, norm2) with H of shape (n1, n2, 2, 2, m):
    H_ij = P(f) (d_i d_j f - Gamma^k_ij d_k f).
    """
    dom = f.domain
    v = f.values
    fu = _d1(dom, v, 0)
    fv = _d1(dom, v, 1)
    fuu = _d2(dom, v, 0)
    fvv = _d2(dom, v, 1)
    fuv = _d1(dom, fv, 0)
    G = dom.christoffel_grid()  # (n1, n2, k, i, j)
    H = np.empty(v.shape[:2] + (2, 2) + v.shape[-1:])
    second = ((fuu, fuv), (fuv, fvv))
    for i in range(2):
        for j in range(2):
            corr = G[..., 0, i, j, None] * fu + G[..., 1, i, j, None] * fv
            H[..., i, j, :] = second[i][j] - corr
    P = f.target.tangent_projector(v)
    H = np.einsum("...ab,...ijb->...ija", P, H)
    ginv = dom.inv_metric_diag_grid()
    norm2 = np.zeros(v.shape[:2])
    for i in range(2):
        for j in range(2):
            norm2 += ginv[..., i] * ginv[..., j] * np.sum(H[..., i, j, :] ** 2, axis=-1)
    return H, norm2


# -- per-node wrappers -------------------------------------------------------


def differential(f, node):
    """Jacobian at a grid node (m, 2)."""
    return jacobian_field(f)[node]


def pullback_and_spectrum(f, node):
    """(pullback 2x2, lam desc, S, e) at a grid node."""
    J = jacobian_field(f)
    P = pullback_field(f, J)[node]
    lam, S, e = spectrum_fields(f, J)
    return P, lam[node], float(S[node]), float(e[node])


def tension_at(f, node):
    return tension_field(f)[node]


def hessian(f, node):
    H, n2 = hessian_field(f)
    return H[node], float(n2[node])


# -- serialization -----------------------------------------------------------


def save_map(f, path):
    """Plain-text grid dump: descriptor header plus row-major node values."""
    with open(path, "w") as fh:
        fh.write("bochnerlab-map 1\n")
        fh.write(f"domain {f.domain.descriptor()}\n")
        fh.write(f"target {f.target.descriptor()}\n")
        fh.write(f"grid {f.domain.n1} {f.domain.n2} {f.target.m}\n")
        flat = f.values.reshape(-1, f.target.m)
        for row in flat:
            fh.write(" ".join(fmt17(x) for x in row) + "\n")


def load_map(path):
    with open(path) as fh:
        magic = fh.readline().split()
        if not magic or magic[0] != "bochnerlab-map":
            raise UsageError(f"{path} is not a map dump")
        header = {}
        for _ in range(3):
            key, _, rest = fh.readline().partition(" ")
            header[key.strip()] = rest.strip()
        try:
            n1, n2, m = (int(x) for x in header["grid"].split())
        except (KeyError, ValueError) as exc:
            raise UsageError(f"bad grid header in {path}") from exc
        domain = parse_domain(header["domain"], n1, n2)
        target = parse_target(header["target"])
        if target.m != m:
            raise UsageError(f"ambient dimension mismatch in {path}")
        vals = np.loadtxt(fh).reshape(n1, n2, m)
    return DiscreteMap(domain, target, vals)
