"""Curvature terms of the Bochner identity for maps, and the inequality
chain that turns them into a pointwise pinching bound.

The curvature quantity is

    Q = Ric^{ij} (f*gbar)_{ij}  -  g^{ia} g^{jb} <Rbar(d_i f, d_j f) d_b f, d_a f>,

a frame-invariant contraction; the eigenframe evaluation (weights
lam_i lam_j on the pullback singular directions) is kept as a second
path and must agree with the contraction.  For a harmonic map the
discrete residual (1/2) Lap |df|^2 - |H|^2 - Q decays at second order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HypothesisViolationError, UsageError
from .maps import hessian_field, jacobian_field, pullback_field, tension_field
from .numerics import gen_eigh
from .targets import sectional_batch

DEGENERATE_PAIR_TOL = 1e-14


def _inv_metric_full(domain):
    g = domain.metric_grid()
    return np.linalg.inv(g)


def ricci_term_field(f, J=None):
    """Ric^{ij} (f*gbar)_{ij} at every node."""
    if J is None:
        J = jacobian_field(f)
    P = pullback_field(f, J)
    ginv = _inv_metric_full(f.domain)
    ric = f.domain.ricci_grid()
    return np.einsum("...ia,...jb,...ab,...ij->...", ginv, ginv, ric, P)


def target_term_field(f, J=None):
    """Invariant contraction of the target curvature term (Gauss equation)."""
    if J is None:
        J = jacobian_field(f)
    q = f.values
    tgt = f.target
    m = tgt.m
    A = np.empty(q.shape[:2] + (2, 2, m))
    for i in range(2):
        for j in range(2):
            A[..., i, j, :] = tgt.second_fundamental(q, J[..., i], J[..., j])
    ginv = _inv_metric_full(f.domain)
    t1 = np.einsum("...ia,...jb,...iam,...jbm->...", ginv, ginv, A, A)
    t2 = np.einsum("...ia,...jb,...ibm,...jam->...", ginv, ginv, A, A)
    return t1 - t2


def target_term_diagonal_field(f, J=None):
    """Eigenframe evaluation: 2 sum_{a<b} Sec(u_a, u_b) lam_a lam_b.

    Summands with lam_a lam_b below the degeneracy cutoff are dropped
    (their weight vanishes).  Cross-check path for target_term_field.
    """
    if J is None:
        J = jacobian_field(f)
    P = pullback_field(f, J)
    g = f.domain.metric_grid()
    lam, vecs = gen_eigh(P, g)  # ascending, g-orthonormal columns
    n = lam.shape[-1]
    out = np.zeros(lam.shape[:-1])
    for a in range(n):
        for b in range(a + 1, n):
            w = lam[..., a] * lam[..., b]
            ua = np.einsum("...mi,...i->...m", J, vecs[..., :, a])
            ub = np.einsum("...mi,...i->...m", J, vecs[..., :, b])
            sec = sectional_batch(f.target, f.values, ua, ub)
            sec = np.nan_to_num(sec, nan=0.0, posinf=0.0, neginf=0.0)
            out += np.where(w > DEGENERATE_PAIR_TOL, 2.0 * sec * w, 0.0)
    return out


def bochner_Q_field(f, J=None):
    if J is None:
        J = jacobian_field(f)
    return ricci_term_field(f, J) - target_term_field(f, J)


def ricci_term(f, node):
    return float(ricci_term_field(f)[node])


def target_term(f, node):
    return float(target_term_field(f)[node])


def bochner_Q(f, node):
    return float(bochner_Q_field(f)[node])


@dataclass(frozen=True)
class BochnerData:
    """Per-node Bochner bookkeeping for one map."""

    ricci: np.ndarray
    target: np.ndarray
    target_frame: np.ndarray
    Q: np.ndarray
    hess: np.ndarray  # |H|^2
    lap: np.ndarray  # (1/2) Lap |df|^2
    residual: np.ndarray
    sup_residual: float
    sup_tension: float
    path_disagreement: float
    S: np.ndarray
    lam: np.ndarray
    e: np.ndarray


def compute_bochner(f):
    """Evaluate every term of the identity on the grid.

    Sup norms are taken over unflagged nodes.  The residual is
    meaningful when sup_tension is small (numerically harmonic map).
    """
    dom = f.domain
    J = jacobian_field(f)
    P = pullback_field(f, J)
    g = dom.metric_grid()
    lam, _ = gen_eigh(P, g)
    lam = np.where(lam > -1e-12, np.maximum(lam, 0.0), lam)[..., ::-1]
    S = lam.sum(axis=-1)
    ric = ricci_term_field(f, J)
    tt = target_term_field(f, J)
    ttf = target_term_diagonal_field(f, J)
    Q = ric - tt
    _, hess = hessian_field(f)
    lap = 0.5 * dom.laplace_beltrami(S)
    residual = lap - hess - Q
    tau = tension_field(f)
    keep = ~dom.flagged_mask()
    sup_res = float(np.max(np.abs(residual[keep])))
    sup_tau = float(np.max(np.linalg.norm(tau, axis=-1)[keep]))
    disagreement = float(np.max(np.abs((tt - ttf))[keep]))
    return BochnerData(
        ricci=ric,
        target=tt,
        target_frame=ttf,
        Q=Q,
        hess=hess,
        lap=lap,
        residual=residual,
        sup_residual=sup_res,
        sup_tension=sup_tau,
        path_disagreement=disagreement,
        S=S,
        lam=lam,
        e=S / 2.0,
    )


def bochner_residual(f):
    """(residual field, sup over unflagged nodes, sup tension)."""
    data = compute_bochner(f)
    return data.residual, data.sup_residual, data.sup_tension


def integral_identity_residual(f, data=None):
    """Quadrature of |H|^2 + Q over the domain.

    Vanishes for exactly harmonic maps; the discrete value tends to
    zero under grid refinement.
    """
    if data is None:
        data = compute_bochner(f)
    w = f.domain.quad_weight_grid()
    return float(np.sum((data.hess + data.Q) * w))


# -- the lambda inequality chain --------------------------------------------


@dataclass(frozen=True)
class LambdaChain:
    """sum_{i<j} lam_i lam_j, its closed form, and the 1/n bound."""

    lhs: float
    mid: float
    bound: float
    n: int
    equality: bool

    @property
    def bound_ok(self):
        return self.mid <= self.bound + 1e-12


def lambda_chain_check(lams):
    """Verify the elementary-symmetric identity and its Cauchy-Schwarz bound.

    For lam_i >= 0:
      lhs  = sum_{i<j} lam_i lam_j
      mid  = (S^2 - sum lam_i^2) / 2      (equal by algebra)
      bound = (n-1)/(2n) S^2              (mid <= bound always)
    equality holds iff all lam_i coincide.
    """
    lam = np.asarray(lams, dtype=float)
    if lam.ndim != 1 or lam.size < 1:
        raise UsageError("lambda_chain_check takes a 1-D vector")
    if np.any(lam < -1e-12):
        raise UsageError("singular values must be nonnegative")
    lam = np.maximum(lam, 0.0)
    n = lam.size
    S = lam.sum()
    lhs = float((S**2 - np.sum(lam**2)) / 2.0) if n > 50 else float(
        sum(lam[i] * lam[j] for i in range(n) for j in range(i + 1, n))
    )
    mid = float((S**2 - np.sum(lam**2)) / 2.0)
    bound = float((n - 1) / (2.0 * n) * S**2)
    equality = bool(np.max(lam) - np.min(lam) <= 1e-12)
    return LambdaChain(lhs=lhs, mid=mid, bound=bound, n=n, equality=equality)


# -- pointwise pinching ------------------------------------------------------


@dataclass(frozen=True)
class PinchingCheck:
    Q: float
    bound: float
    bound_energy_form: float
    slack: float


def pinching_bound_fields(f, ric_min, sec_max, data=None):
    """(Q, bound, slack) fields for Q >= S (ric_min - (n-1)/n sec_max S)."""
    if data is None:
        data = compute_bochner(f)
    n = f.domain.n
    S = data.S
    bound = S * (ric_min - (n - 1) / n * sec_max * S)
    return data.Q, bound, data.Q - bound


def pointwise_pinching_check(f, node, ric_min, sec_max, require_hypothesis=True):
    """Evaluate the pointwise pinching bound at a node.

    Also evaluates the energy-density form of the same bound,
    2e (ric_min - 2(n-1)/n sec_max e), which is the identical
    polynomial after S = 2e.
    """
    if require_hypothesis and sec_max < 0:
        raise HypothesisViolationError(
            "sec_max < 0 violates the nonnegative-curvature hypothesis"
        )
    data = compute_bochner(f)
    n = f.domain.n
    S = float(data.S[node])
    e = S / 2.0
    Q = float(data.Q[node])
    bound = S * (ric_min - (n - 1) / n * sec_max * S)
    bound_e = 2 * e * (ric_min - 2 * (n - 1) / n * sec_max * e)
    return PinchingCheck(
        Q=Q, bound=float(bound), bound_energy_form=float(bound_e), slack=Q - bound
    )
