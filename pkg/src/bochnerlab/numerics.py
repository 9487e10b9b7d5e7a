"""Small shared numerical helpers: batched generalized eigensolves,
Gram-Schmidt for plane frames, deterministic per-point seeding and
17-significant-digit float formatting for byte-stable output files.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .errors import NumericalError


def gen_eigh(P, g):
    """Solve the symmetric generalized eigenproblem P v = lam g v (batched).

    P and g are (..., n, n) with P symmetric and g SPD.  Returns
    (lam, vecs) with eigenvalues ascending along the last axis and
    eigenvector columns g-orthonormal.  lam are the eigenvalues of
    g^{-1} P, i.e. the squared singular values when P is a pullback
    metric.
    """
    P = np.asarray(P, dtype=float)
    g = np.asarray(g, dtype=float)
    try:
        L = np.linalg.cholesky(g)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"metric not positive definite: {exc}") from exc
    Linv = np.linalg.inv(L)
    A = Linv @ P @ np.swapaxes(Linv, -1, -2)
    A = 0.5 * (A + np.swapaxes(A, -1, -2))
    lam, W = np.linalg.eigh(A)
    vecs = np.swapaxes(Linv, -1, -2) @ W
    return lam, vecs


def gen_eigvalsh(P, g):
    """Eigenvalues of g^{-1} P, ascending (batched)."""
    return gen_eigh(P, g)[0]


def orthonormal_pair(X, Y, eps=1e-12):
    """Gram-Schmidt a batch of vector pairs (..., m).

    Returns (Xh, Yh, ok) where ok marks pairs that span a genuine
    2-plane.  Degenerate pairs come back unchanged with ok False.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    nx = np.linalg.norm(X, axis=-1, keepdims=True)
    ok = nx[..., 0] > eps
    Xh = np.divide(X, np.where(nx > eps, nx, 1.0))
    Yp = Y - np.sum(Xh * Y, axis=-1, keepdims=True) * Xh
    ny = np.linalg.norm(Yp, axis=-1, keepdims=True)
    ok = ok & (ny[..., 0] > eps)
    Yh = np.divide(Yp, np.where(ny > eps, ny, 1.0))
    return Xh, Yh, ok


def point_seed(q, seed=0):
    """Deterministic 64-bit seed derived from a point's coordinates.

    Used so that per-point randomized searches are functions of the
    point alone; maxima over point sets are then monotone under set
    inclusion by construction.
    """
    q = np.ascontiguousarray(np.asarray(q, dtype=float))
    h = hashlib.blake2b(q.tobytes(), digest_size=8,
                        key=int(seed).to_bytes(8, "little", signed=False))
    return int.from_bytes(h.digest(), "little")


def fmt17(x):
    """Format a float with 17 significant digits (round-trip stable)."""
    return format(float(x), ".17g")
