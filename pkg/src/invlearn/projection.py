"""Euclidean projection onto a polyhedron via a primal active-set method.

Minimizes ||z - c||^2 subject to Ez = f and Gz >= h. The Hessian is the
identity, so every working-set subproblem is an equality-constrained
least-squares solve. A Phase-I LP supplies the feasible starting point and
an infeasibility certificate when the system is empty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleError, NumericError
from .simplex import FEAS_TOL, INFEASIBLE, LpSpec, solve_lp


@dataclass(frozen=True)
class ProjectionSpec:
    target: np.ndarray
    eq_A: Optional[np.ndarray] = None
    eq_b: Optional[np.ndarray] = None
    ineq_A: Optional[np.ndarray] = None
    ineq_b: Optional[np.ndarray] = None


@dataclass
class ProjectionResult:
    point: np.ndarray
    active: list
    sq_distance: float
    iterations: int = 0


def _feasible_start(c, E, f, G, h, tol):
    lp = LpSpec(c=np.zeros(c.shape[0]), eq_A=E if E.size else None,
                eq_b=f if f.size else None, ineq_A=G if G.size else None,
                ineq_b=h if h.size else None)
    out = solve_lp(lp, tol=tol)
    if out.status == INFEASIBLE:
        raise InfeasibleError("projection constraint system is infeasible",
                              residual=out.phase1_residual,
                              certificate=out.certificate)
    return out.x


def _solve_working(c, E, f, G, h, W):
    """Minimizer of ||z-c||^2 s.t. Ez=f and g_i'z = h_i for i in W."""
    rows = [E] if E.size else []
    rhs = [f] if f.size else []
    if W:
        rows.append(G[W, :])
        rhs.append(h[W])
    if not rows:
        return c.copy()
    M = np.vstack(rows)
    d = np.concatenate(rhs)
    # z = c - M'u with (M M')u = Mc - d; lstsq tolerates redundant rows.
    u, *_ = np.linalg.lstsq(M @ M.T, M @ c - d, rcond=None)
    return c - M.T @ u


def _working_multipliers(c, E, G, W, z):
    """Multipliers nu (equalities) and mu (working rows) from z - c = -M'[nu;mu]."""
    rows = [E] if E.size else []
    if W:
        rows.append(G[W, :])
    if not rows:
        return np.zeros(0)
    M = np.vstack(rows)
    lam, *_ = np.linalg.lstsq(M.T, z - c, rcond=None)
    n_eq = E.shape[0] if E.size else 0
    return lam[n_eq:]


def _kkt_certified(c, z, E, G, h, tol):
    """True iff z - c lies in the cone of the tight-row normals (plus the
    row space of E), i.e. z is the global minimizer. Nonnegative least
    squares settles this where signed lstsq multipliers cannot (they are
    non-unique on degenerate vertices)."""
    from .linalg import nonneg_lstsq
    tight = np.flatnonzero(G @ z - h <= tol) if G.size else np.zeros(0, int)
    rows = []
    if E.size:
        rows.extend([E, -E])
    if tight.size:
        rows.append(G[tight, :])
    grad = z - c
    scale = 1.0 + float(np.linalg.norm(grad))
    if not rows:
        return float(np.linalg.norm(grad)) <= 1e-8 * scale
    M = np.vstack(rows)
    _, resid = nonneg_lstsq(M.T, grad)
    return resid <= 1e-8 * scale


def _escape_direction(c, z, E, G, h, tol):
    """Feasible direction improving ||z-c||^2 at a degenerate vertex.

    Maximizes (c-z)'d subject to Ed = 0, g_i'd >= 0 on every tight row,
    and box bounds |d_j| <= 1. A nonpositive optimum certifies that z is
    the global minimizer (Farkas); otherwise the returned d strictly
    decreases the objective, which rules out active-set cycling.
    """
    tight = [int(i) for i in np.flatnonzero(G @ z - h <= tol)] if G.size else []
    n = z.shape[0]
    spec = LpSpec(c=-(c - z),
                  eq_A=E if E.size else None,
                  eq_b=np.zeros(E.shape[0]) if E.size else None,
                  ineq_A=G[tight, :] if tight else None,
                  ineq_b=np.zeros(len(tight)) if tight else None,
                  lower=-np.ones(n), upper=np.ones(n))
    out = solve_lp(spec, tol=tol)
    if out.status != "optimal":
        raise NumericError("projection escape LP failed")
    gain = float((c - z) @ out.x)
    scale = 1.0 + float(np.linalg.norm(c - z))
    if gain <= 1e-9 * scale:
        return None
    return out.x


def project_point(spec: ProjectionSpec, tol: float = FEAS_TOL,
                  max_iter: int = 500) -> ProjectionResult:
    """Project spec.target onto {Ez = f, Gz >= h}.

    Returns the minimizer, the tolerance-tight inequality rows at it, and
    the squared distance. Raises InfeasibleError with a Phase-I certificate
    when the system is empty.
    """
    c = np.atleast_1d(np.asarray(spec.target, dtype=float))
    n = c.shape[0]
    E = np.zeros((0, n)) if spec.eq_A is None else np.atleast_2d(
        np.asarray(spec.eq_A, dtype=float))
    f = np.zeros(0) if spec.eq_b is None else np.atleast_1d(
        np.asarray(spec.eq_b, dtype=float))
    G = np.zeros((0, n)) if spec.ineq_A is None else np.atleast_2d(
        np.asarray(spec.ineq_A, dtype=float))
    h = np.zeros(0) if spec.ineq_b is None else np.atleast_1d(
        np.asarray(spec.ineq_b, dtype=float))

    z = _feasible_start(c, E, f, G, h, tol)
    W = sorted(int(i) for i in np.flatnonzero(G @ z - h <= tol)) if G.size else []

    for it in range(max_iter):
        z_star = _solve_working(c, E, f, G, h, W)
        step = z_star - z
        if float(np.linalg.norm(step)) <= 1e-11:
            # Stationary on the working set: check signs of mu.
            mu = _working_multipliers(c, E, G, W, z_star)
            if mu.size == 0 or np.min(mu) >= -1e-9:
                z = z_star
                break
            # A negative multiplier here is not conclusive: on degenerate
            # vertices (more tight rows than dimensions) the lstsq
            # multipliers are non-unique, and dropping rows one at a time
            # can cycle. Certify with NNLS first; if that fails, find a
            # strictly improving feasible direction over the full tight
            # set with an LP.
            if _kkt_certified(c, z_star, E, G, h, tol):
                z = z_star
                break
            d = _escape_direction(c, z_star, E, G, h, tol)
            if d is None:
                z = z_star
                break
            z = z_star
            # Exact line search for the identity-Hessian objective,
            # capped by the first strictly-slack row the ray crosses.
            alpha = float((c - z) @ d) / float(d @ d)
            if G.size:
                slack = G @ z - h
                rates = G @ d
                for i in range(G.shape[0]):
                    if slack[i] > tol and rates[i] < -1e-12:
                        alpha = min(alpha, float(slack[i] / -rates[i]))
            z = z + alpha * d
            W = (sorted(int(i) for i in np.flatnonzero(G @ z - h <= tol))
                 if G.size else [])
            continue
        # Longest step toward z_star that keeps the slack rows feasible.
        alpha, blocker = 1.0, -1
        if G.size:
            for i in range(G.shape[0]):
                if i in W:
                    continue
                gi_step = float(G[i, :] @ step)
                if gi_step < -1e-12:
                    a = float(G[i, :] @ z - h[i]) / (-gi_step)
                    if a < alpha - 1e-12:
                        alpha, blocker = a, i
                    elif abs(a - alpha) <= 1e-12 and (blocker < 0 or i < blocker):
                        alpha, blocker = min(a, alpha), i
        z = z + alpha * step
        if blocker >= 0:
            W.append(blocker)
            W.sort()
    else:
        raise NumericError("projection active-set iteration limit reached")

    active = ([int(i) for i in np.flatnonzero(np.abs(G @ z - h) <= tol)]
              if G.size else [])
    sq = float(np.dot(z - c, z - c))
    return ProjectionResult(point=z, active=active, sq_distance=sq,
                            iterations=it + 1)
