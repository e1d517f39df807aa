"""Small dense linear-algebra helpers: numerical rank and PD tests."""

from __future__ import annotations

import numpy as np

from .errors import SpecificationError


def rank(m, tol: float | None = None) -> int:
    """Numerical rank via Gaussian elimination with partial pivoting.

    Default threshold is 1e-9 times the matrix max-abs entry.
    """
    a = np.array(m, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.size == 0:
        return 0
    maxabs = float(np.max(np.abs(a)))
    if maxabs == 0.0:
        return 0
    if tol is None:
        tol = 1e-9 * maxabs
    if tol <= 0:
        raise SpecificationError("rank tolerance must be positive")
    nrows, ncols = a.shape
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        p = r + int(np.argmax(np.abs(a[r:, col])))
        if abs(a[p, col]) <= tol:
            continue
        if p != r:
            a[[r, p], :] = a[[p, r], :]
        a[r + 1:, col:] -= np.outer(a[r + 1:, col] / a[r, col], a[r, col:])
        r += 1
    return r


def is_positive_definite(m, tol: float = 0.0, sym_tol: float = 1e-7) -> bool:
    """True iff an unpivoted Cholesky succeeds with every pivot > tol.

    Raises SpecificationError when the input is not symmetric within
    ``sym_tol`` (relative to max-abs).
    """
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SpecificationError("positive-definiteness requires a square matrix")
    scale = max(float(np.max(np.abs(a))), 1.0)
    if float(np.max(np.abs(a - a.T))) > sym_tol * scale:
        raise SpecificationError("matrix is not symmetric within tolerance")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    L = np.zeros_like(a)
    for j in range(n):
        s = a[j, j] - L[j, :j] @ L[j, :j]
        if s <= tol:
            return False
        L[j, j] = np.sqrt(s)
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ L[j, :j]) / L[j, j]
    return True


def null_space_basis(m, tol: float | None = None) -> np.ndarray:
    """Orthonormal basis of the null space (columns), via SVD."""
    a = np.atleast_2d(np.asarray(m, dtype=float))
    if a.size == 0:
        return np.zeros((a.shape[1], 0))
    u, s, vt = np.linalg.svd(a)
    if tol is None:
        tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0)
        tol = max(tol, 1e-12)
    nnz = int(np.sum(s > tol))
    return vt[nnz:].T


def nonneg_lstsq(A, b, tol: float | None = None, max_iter: int | None = None):
    """Lawson-Hanson active-set solve of min ||A x - b|| with x >= 0.

    Returns (x, residual_norm). Deterministic: the entering index is the
    largest dual, ties to the lowest index.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    m, n = A.shape
    if tol is None:
        tol = 1e-11 * max(1.0, float(np.abs(A.T @ b).max())) if n else 0.0
    if max_iter is None:
        max_iter = 3 * max(n, 10)
    x = np.zeros(n)
    passive: list = []
    resid = b.copy()
    for _ in range(max_iter):
        w = A.T @ resid
        w[passive] = -np.inf
        j = int(np.argmax(w))
        if not np.isfinite(w[j]) or w[j] <= tol:
            break
        passive.append(j)
        passive.sort()
        while True:
            s, *_ = np.linalg.lstsq(A[:, passive], b, rcond=None)
            if s.min() > 0.0:
                x = np.zeros(n)
                x[passive] = s
                break
            # Step back to the boundary and drop the variables that hit it.
            # The blocking indices are zeroed explicitly: roundoff leaving
            # them at a tiny positive value would stall the loop.
            xp = x[passive]
            neg = s <= 0.0
            ratios = xp[neg] / (xp[neg] - s[neg])
            alpha = float(np.min(ratios))
            x = np.zeros(n)
            x[passive] = xp + alpha * (s - xp)
            blocked = np.asarray(passive)[neg][ratios <= alpha + 1e-12]
            x[blocked] = 0.0
            passive = [k for k in passive if x[k] > 0.0]
            if not passive:
                x = np.zeros(n)
                break
        resid = b - A @ x
    return x, float(np.linalg.norm(resid))


def least_distance(G, h, feas_tol: float = 1e-9):
    """Minimum-norm x with Gx >= h, or None when the system is empty.

    Lawson-Hanson reduction of least-distance programming to nonnegative
    least squares: solve min_{u>=0} ||E u - f|| with E = [G'; h'] and
    f = (0, ..., 0, 1). The residual r = E u - f has r_{n+1} < 0 exactly
    when the system is feasible, and then x = -r_{1:n} / r_{n+1}. Rows
    are scaled to unit norm first, which leaves the constraint set
    unchanged and keeps the residual test well conditioned.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.atleast_1d(np.asarray(h, dtype=float))
    m, n = G.shape
    scale = np.maximum(np.sqrt((G * G).sum(axis=1) + h * h), 1e-300)
    E = np.vstack([G.T / scale, (h / scale).reshape(1, -1)])
    f = np.zeros(n + 1)
    f[-1] = 1.0
    u, _ = nonneg_lstsq(E, f)
    r = E @ u - f
    if r[-1] >= -feas_tol:
        return None
    x = -r[:n] / r[-1]
    # Polish: the division above amplifies solver error when many rows are
    # tight. Re-project as the min-norm solution of the tight-row equality
    # system (what lstsq returns for consistent underdetermined systems)
    # and keep it only when it is feasible and no longer than x.
    Gs, hs = G / scale[:, None], h / scale
    slack = Gs @ x - hs
    tight = slack <= 1e-6 * (1.0 + float(np.linalg.norm(x)))
    if tight.any():
        xp, *_ = np.linalg.lstsq(Gs[tight, :], hs[tight], rcond=None)
        if (float(np.min(Gs @ xp - hs)) >= -1e-9
                and float(xp @ xp) <= float(x @ x) + 1e-9):
            return xp
    return x
