"""Dense two-phase simplex solver with Bland's anti-cycling rule.

Solves  min c'x  s.t.  Ex = f,  Gx >= h,  lower <= x <= upper  with free
variables split into positive/negative parts. Deterministic for a fixed
spec: entering/leaving ties always go to the lowest index, so identical
inputs yield identical outcomes bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NumericError, SpecificationError

FEAS_TOL = 1e-7
PIVOT_TOL = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


def _as_matrix(a, ncols):
    if a is None:
        return np.zeros((0, ncols))
    a = np.asarray(a, dtype=float)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.size and a.shape[1] != ncols:
        raise SpecificationError(
            f"matrix has {a.shape[1]} columns, expected {ncols}")
    return a


def _as_vector(v, n, name):
    if v is None:
        return np.zeros(0)
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.shape[0] != n:
        raise SpecificationError(f"{name} has length {v.shape[0]}, expected {n}")
    return v


@dataclass(frozen=True)
class LpSpec:
    """min c'x subject to eq_A x = eq_b, ineq_A x >= ineq_b, bounds."""

    c: np.ndarray
    eq_A: Optional[np.ndarray] = None
    eq_b: Optional[np.ndarray] = None
    ineq_A: Optional[np.ndarray] = None
    ineq_b: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = c.shape[0]
        object.__setattr__(self, "c", c)
        eq_A = _as_matrix(self.eq_A, n)
        ineq_A = _as_matrix(self.ineq_A, n)
        eq_b = _as_vector(self.eq_b, eq_A.shape[0], "eq_b")
        ineq_b = _as_vector(self.ineq_b, ineq_A.shape[0], "ineq_b")
        object.__setattr__(self, "eq_A", eq_A)
        object.__setattr__(self, "eq_b", eq_b)
        object.__setattr__(self, "ineq_A", ineq_A)
        object.__setattr__(self, "ineq_b", ineq_b)
        for name in ("lower", "upper"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _as_vector(v, n, name))
        if not np.all(np.isfinite(c)):
            raise SpecificationError("objective contains non-finite entries")
        if self.lower is not None and self.upper is not None:
            lo, up = self.lower, self.upper
            mask = np.isfinite(lo) & np.isfinite(up)
            if np.any(lo[mask] > up[mask]):
                raise SpecificationError("lower bound exceeds upper bound")

    @property
    def n(self) -> int:
        return self.c.shape[0]


@dataclass
class LpOutcome:
    status: str
    x: Optional[np.ndarray] = None
    ineq_duals: Optional[np.ndarray] = None
    eq_duals: Optional[np.ndarray] = None
    objective: Optional[float] = None
    phase1_residual: Optional[float] = None
    certificate: Optional[np.ndarray] = None
    pivots: int = field(default=0)


def _bland_enter(reduced, tol):
    idx = np.flatnonzero(reduced < -tol)
    return int(idx[0]) if idx.size else -1


def _bland_leave(col, rhs, basis, tol):
    mask = col > tol
    if not mask.any():
        return -1
    rows = np.flatnonzero(mask)
    ratios = rhs[rows] / col[rows]
    # Among minimal ratios, leave the basic variable with the lowest
    # variable index (Bland's anti-cycling rule).
    ties = rows[np.flatnonzero(ratios <= ratios.min() + 1e-12)]
    return int(min(ties, key=lambda r: basis[r]))


def _run_simplex(T, basis, ncols, tol, max_iter, target=None):
    """Iterate the tableau in place; returns pivot count.

    ``target``: stop as soon as the objective drops to this value (used by
    Phase I, where any residual below the feasibility tolerance is enough
    and grinding further just accumulates roundoff).
    """
    pivots = 0
    for _ in range(max_iter):
        if target is not None and -T[-1, -1] <= target:
            return pivots, OPTIMAL
        reduced = T[-1, :ncols]
        j = _bland_enter(reduced, tol)
        if j < 0:
            return pivots, OPTIMAL
        r = _bland_leave(T[:-1, j], T[:-1, -1], basis, PIVOT_TOL)
        if r < 0:
            return pivots, UNBOUNDED
        piv = T[r, j]
        if abs(piv) < PIVOT_TOL:
            raise NumericError("pivot below tolerance")
        T[r, :] /= piv
        factors = T[:, j].copy()
        factors[r] = 0.0
        T -= np.outer(factors, T[r, :])
        # Standard-form rhs is nonnegative; clear roundoff-level negatives
        # so later ratio tests stay sound.
        rhs = T[:-1, -1]
        rhs[(rhs < 0) & (rhs > -1e-9)] = 0.0
        basis[r] = j
        pivots += 1
    raise NumericError("simplex iteration limit reached")


def solve_lp(spec: LpSpec, tol: float = FEAS_TOL) -> LpOutcome:
    """Solve the LP; status in {optimal, infeasible, unbounded}.

    On optimal, ``ineq_duals`` holds one nonnegative multiplier per
    inequality row satisfying c = ineq_A' lam + eq_A' nu (+ bound duals).
    """
    n = spec.n
    rows_A = [spec.eq_A, spec.ineq_A]
    rhs = [spec.eq_b, spec.ineq_b]
    n_eq = spec.eq_A.shape[0]
    n_ineq = spec.ineq_A.shape[0]

    # Bounds become extra >= rows so the dual bookkeeping stays uniform.
    bound_rows, bound_rhs = [], []
    if spec.lower is not None:
        for j, lo in enumerate(spec.lower):
            if np.isfinite(lo):
                e = np.zeros(n)
                e[j] = 1.0
                bound_rows.append(e)
                bound_rhs.append(lo)
    if spec.upper is not None:
        for j, up in enumerate(spec.upper):
            if np.isfinite(up):
                e = np.zeros(n)
                e[j] = -1.0
                bound_rows.append(e)
                bound_rhs.append(-up)
    if bound_rows:
        rows_A.append(np.array(bound_rows))
        rhs.append(np.array(bound_rhs))

    A = np.vstack([a for a in rows_A if a.size] or [np.zeros((0, n))])
    b = np.concatenate([r for r in rhs if r.size] or [np.zeros(0)])
    m = A.shape[0]
    n_geq = m - n_eq  # inequality + bound rows, all Ax >= b

    # Standard form: x = u - v, surplus s on >= rows.
    ncols = 2 * n + n_geq
    S = np.zeros((m, ncols))
    S[:, :n] = A
    S[:, n:2 * n] = -A
    for k in range(n_geq):
        S[n_eq + k, 2 * n + k] = -1.0
    bb = b.copy()
    signs = np.ones(m)
    for i in range(m):
        if bb[i] < 0:
            S[i, :] *= -1.0
            bb[i] *= -1.0
            signs[i] = -1.0

    max_iter = 2000 + 200 * (m + ncols)

    # Phase I: artificial variable per row.
    T = np.zeros((m + 1, ncols + m + 1))
    T[:m, :ncols] = S
    T[:m, ncols:ncols + m] = np.eye(m)
    T[:m, -1] = bb
    basis = list(range(ncols, ncols + m))
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, ncols:ncols + m] = 0.0
    pivots, status = _run_simplex(T, basis, ncols + m, tol * 1e-2, max_iter,
                                  target=tol * 0.5)
    phase1 = -T[-1, -1]
    if phase1 > tol:
        cert = np.array([T[-1, ncols + i] for i in range(m)])
        return LpOutcome(status=INFEASIBLE, phase1_residual=float(phase1),
                         certificate=cert, pivots=pivots)

    # Drive remaining artificials out of the basis; drop redundant rows.
    keep = list(range(m))
    for r in range(m):
        if basis[r] >= ncols:
            cand = np.flatnonzero(np.abs(T[r, :ncols]) > PIVOT_TOL)
            if cand.size:
                j = int(cand[0])
                piv = T[r, j]
                T[r, :] /= piv
                for i in range(T.shape[0]):
                    if i != r and abs(T[i, j]) > 1e-14:
                        T[i, :] -= T[i, j] * T[r, :]
                basis[r] = j
            else:
                keep.remove(r)
    rows = keep + [m]
    T2 = T[np.ix_(rows, list(range(ncols)) + [ncols + m])].copy()
    basis2 = [basis[r] for r in keep]
    m2 = len(keep)

    # Phase II objective.
    cost = np.zeros(ncols)
    cost[:n] = spec.c
    cost[n:2 * n] = -spec.c
    T2[-1, :ncols] = cost
    T2[-1, -1] = 0.0
    for r in range(m2):
        j = basis2[r]
        if abs(T2[-1, j]) > 1e-14:
            T2[-1, :] -= T2[-1, j] * T2[r, :]
    piv2, status = _run_simplex(T2, basis2, ncols, tol * 1e-2, max_iter)
    pivots += piv2
    if status == UNBOUNDED:
        return LpOutcome(status=UNBOUNDED, pivots=pivots)

    xs = np.zeros(ncols)
    for r in range(m2):
        xs[basis2[r]] = T2[r, -1]
    x = xs[:n] - xs[n:2 * n]
    obj = float(spec.c @ x)

    # Duals: solve B' y = c_B on the kept rows, then map back per row.
    B = np.zeros((m2, m2))
    Ssub = S[keep, :]
    for k, j in enumerate(basis2):
        B[:, k] = Ssub[:, j]
    cB = cost[basis2]
    try:
        y_kept = np.linalg.solve(B.T, cB)
    except np.linalg.LinAlgError:
        y_kept, *_ = np.linalg.lstsq(B.T, cB, rcond=None)
    y = np.zeros(m)
    for k, r in enumerate(keep):
        y[r] = y_kept[k] * signs[r]
    eq_duals = y[:n_eq]
    ineq_duals = np.maximum(y[n_eq:n_eq + n_ineq], 0.0)
    return LpOutcome(status=OPTIMAL, x=x, ineq_duals=ineq_duals,
                     eq_duals=eq_duals, objective=obj, pivots=pivots)


def check_kkt(spec: LpSpec, out: LpOutcome, tol: float = FEAS_TOL):
    """Max primal violation, min dual, max complementary-slackness gap."""
    x = out.x
    viol = 0.0
    if spec.eq_A.size:
        viol = max(viol, float(np.max(np.abs(spec.eq_A @ x - spec.eq_b))))
    slack = np.zeros(0)
    if spec.ineq_A.size:
        slack = spec.ineq_A @ x - spec.ineq_b
        viol = max(viol, float(np.max(np.maximum(-slack, 0.0), initial=0.0)))
    if spec.lower is not None:
        mask = np.isfinite(spec.lower)
        if mask.any():
            viol = max(viol, float(np.max(spec.lower[mask] - x[mask], initial=0.0)))
    if spec.upper is not None:
        mask = np.isfinite(spec.upper)
        if mask.any():
            viol = max(viol, float(np.max(x[mask] - spec.upper[mask], initial=0.0)))
    min_dual = float(np.min(out.ineq_duals, initial=0.0))
    comp = 0.0
    if slack.size:
        comp = float(np.max(np.abs(out.ineq_duals * slack), initial=0.0))
    return viol, min_dual, comp
