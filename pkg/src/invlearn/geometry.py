"""Polyhedral normal-cone machinery and identifiability diagnostics.

Active sets, cone membership, the compatible-parameter polytope for a
candidate solution, the single-ray verdict over several observations, the
excitation matrix, and stationarity residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SpecificationError
from .linalg import (
    is_positive_definite,
    least_distance,
    nonneg_lstsq,
    null_space_basis,
    rank,
)
from .model import NormalizationSet, PolyhedralRegion
from .simplex import INFEASIBLE, OPTIMAL, LpSpec, solve_lp

ACTIVE_TOL = 1e-7


@dataclass(frozen=True)
class ActiveSet:
    point: np.ndarray
    indices: tuple
    tol: float


def active_set(region: PolyhedralRegion, z, tol: float = ACTIVE_TOL) -> ActiveSet:
    """Tolerance-tight rows at z; z need not be feasible (diagnostic use)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    resid = region.A @ z - region.b
    idx = tuple(int(i) for i in np.flatnonzero(np.abs(resid) <= tol))
    return ActiveSet(point=z, indices=idx, tol=tol)


def _gen_matrix(generators) -> np.ndarray:
    G = np.atleast_2d(np.asarray(generators, dtype=float))
    if G.size == 0:
        raise SpecificationError("generator list is empty")
    return G


def cone_contains(generators, theta, tol: float = ACTIVE_TOL) -> bool:
    """True iff theta = sum_i lam_i a_i for some lam >= 0."""
    G = _gen_matrix(generators)
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if theta.shape[0] != G.shape[1]:
        raise SpecificationError("theta dimension mismatch")
    lam, resid = nonneg_lstsq(G.T, theta)
    scale = max(1.0, float(np.linalg.norm(theta)))
    return resid <= tol * scale


def _lifted_spec(c, blocks, norm: NormalizationSet):
    """LpSpec over (theta, lam^1, ..., lam^K) for theta = A_k' lam^k, theta in Theta.

    blocks is a list of generator matrices (rows are normals). c is the
    objective over theta only (padded with zeros for the lam blocks).
    Generator rows are normalized to unit length — the cone is invariant
    under positive row scaling — which keeps the system well conditioned
    even when the raw normals differ in magnitude by orders of magnitude.
    """
    blocks = [B / np.maximum(np.linalg.norm(B, axis=1, keepdims=True), 1e-300)
              for B in blocks]
    n = blocks[0].shape[1] if blocks else c.shape[0]
    sizes = [B.shape[0] for B in blocks]
    total = n + sum(sizes)
    eq_rows = []
    eq_rhs = []
    off = n
    for B, sz in zip(blocks, sizes):
        row = np.zeros((n, total))
        row[:, :n] = np.eye(n)
        row[:, off:off + sz] = -B.T
        eq_rows.append(row)
        eq_rhs.append(np.zeros(n))
        off += sz
    simplex_row = np.zeros((1, total))
    simplex_row[0, :n] = 1.0
    eq_rows.append(simplex_row)
    eq_rhs.append(np.array([1.0]))
    lower = np.zeros(total)
    if norm.anchor_index is not None:
        lower[norm.anchor_index] = norm.anchor_floor
    cfull = np.zeros(total)
    cfull[:n] = c
    return LpSpec(c=cfull, eq_A=np.vstack(eq_rows),
                  eq_b=np.concatenate(eq_rhs), lower=lower), n


def _simplex_member(theta, norm: NormalizationSet):
    """Scale theta into the simplex if possible, else None (exact checks)."""
    s = float(np.sum(theta))
    if s <= 0.0 or float(np.min(theta)) < 0.0:
        return None
    theta = theta / s
    if norm.anchor_index is not None and (
            theta[norm.anchor_index] < norm.anchor_floor):
        return None
    return theta


def cone_meets_normalization(generators, norm: NormalizationSet,
                             tol: float = ACTIVE_TOL):
    """Some theta in cone(generators) ∩ Theta, or None when empty.

    Works in multiplier space: theta = H' lam with lam >= 0, where H has
    the unit-normalized generators as rows (the cone is invariant under
    positive row scaling). The simplex constraint 1'theta = 1 becomes
    s'lam = 1 with s the row sums, so lam with all s_i <= 0 can never
    reach the simplex, and any single generator (or the uniform mix) with
    nonnegative entries and positive sum is a witness without an LP.
    """
    G = _gen_matrix(generators)
    H = G / np.maximum(np.linalg.norm(G, axis=1, keepdims=True), 1e-300)
    s = H.sum(axis=1)
    if float(np.max(s)) <= 0.0:
        return None
    for cand in (*H[(H.min(axis=1) >= 0.0) & (s > 0.0), :], H.sum(axis=0)):
        theta = _simplex_member(cand, norm)
        if theta is not None:
            return theta
    p, n = H.shape
    rows = [H.T, np.eye(p), s.reshape(1, -1), -s.reshape(1, -1)]
    rhs = [np.zeros(n), np.zeros(p), np.array([1.0]), np.array([-1.0])]
    if norm.anchor_index is not None and norm.anchor_floor > 0.0:
        rows.append(H[:, norm.anchor_index].reshape(1, -1))
        rhs.append(np.array([norm.anchor_floor]))
    lam = least_distance(np.vstack(rows), np.concatenate(rhs))
    if lam is None:
        return None
    return H.T @ lam


@dataclass
class ParameterPolytope:
    """Compatible parameters for a fixed point: theta in cone(A_I) ∩ Theta."""

    active: tuple
    generators: np.ndarray
    normalization: NormalizationSet
    lower_bounds: Optional[np.ndarray] = None
    upper_bounds: Optional[np.ndarray] = None
    empty: bool = True
    witness: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.generators.shape[1]

    def contains(self, theta, tol: float = ACTIVE_TOL) -> bool:
        if self.empty:
            return False
        return (self.normalization.contains(theta, tol)
                and cone_contains(self.generators, theta, tol))

    def minimize(self, objective, tol: float = ACTIVE_TOL):
        """theta minimizing objective'theta over the polytope, or None."""
        if self.empty:
            return None
        spec, n = _lifted_spec(np.asarray(objective, dtype=float),
                               [self.generators], self.normalization)
        out = solve_lp(spec, tol=tol)
        return None if out.status != OPTIMAL else out.x[:n]

    def sample(self, rng, count: int, tol: float = ACTIVE_TOL) -> np.ndarray:
        """Random members: vertices from random objectives plus convex mixes."""
        if self.empty:
            return np.zeros((0, self.n))
        verts = []
        for _ in range(max(2, count)):
            theta = self.minimize(rng.normal(size=self.n), tol=tol)
            if theta is not None:
                verts.append(theta)
        verts = np.array(verts)
        weights = rng.dirichlet(np.ones(verts.shape[0]), size=count)
        return weights @ verts


def parameter_polytope(region: PolyhedralRegion, z,
                       norm: NormalizationSet = NormalizationSet(),
                       tol: float = ACTIVE_TOL) -> ParameterPolytope:
    """Characterize all normalized parameters under which z is optimal.

    Requires z feasible. Per-coordinate bounds come from 2n LPs over the
    lifted system; an interior z yields the empty polytope.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if not region.is_feasible_point(z, tol):
        raise SpecificationError("point is not feasible for the region")
    idx = active_set(region, z, tol).indices
    n = region.n
    if not idx:
        return ParameterPolytope(active=(), generators=np.zeros((0, n)),
                                 normalization=norm, empty=True)
    G = region.A[list(idx), :]
    pp = ParameterPolytope(active=idx, generators=G, normalization=norm)
    witness = cone_meets_normalization(G, norm, tol)
    if witness is None:
        return pp
    pp.empty = False
    pp.witness = witness
    lo = np.zeros(n)
    hi = np.zeros(n)
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        tmin = pp.minimize(e, tol=tol)
        tmax = pp.minimize(-e, tol=tol)
        lo[j] = tmin[j] if tmin is not None else np.nan
        hi[j] = tmax[j] if tmax is not None else np.nan
    pp.lower_bounds = lo
    pp.upper_bounds = hi
    return pp


SINGLETON = "singleton"
MULTI = "multi"
EMPTY = "empty"


def is_single_ray(points, region: PolyhedralRegion,
                  norm: NormalizationSet = NormalizationSet(),
                  tol: float = ACTIVE_TOL) -> str:
    """Verdict on the joint rationalizing set ∩_k N(z^k) ∩ Theta.

    "singleton" iff every coordinate-probe LP pair returns max = min;
    "empty" iff the joint lifted system is infeasible.
    """
    blocks = []
    n = region.n
    for z in points:
        idx = active_set(region, z, tol).indices
        # An interior observation constrains theta to the zero cone, which
        # misses the simplex outright.
        if not idx:
            return EMPTY
        blocks.append(region.A[list(idx), :])
    spec, _ = _lifted_spec(np.zeros(n), blocks, norm)
    if solve_lp(spec, tol=tol).status == INFEASIBLE:
        return EMPTY
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        lo_spec, _ = _lifted_spec(e, blocks, norm)
        hi_spec, _ = _lifted_spec(-e, blocks, norm)
        lo = solve_lp(lo_spec, tol=tol)
        hi = solve_lp(hi_spec, tol=tol)
        if lo.status != OPTIMAL or hi.status != OPTIMAL:
            return MULTI
        if abs(lo.x[j] - hi.x[j]) > 1e-7:
            return MULTI
    return SINGLETON


@dataclass
class IdentifiabilityReport:
    cone_ranks: list
    all_one_dimensional: bool
    S: np.ndarray
    S_positive_definite: bool
    S_null_space: Optional[np.ndarray]
    S_complement: np.ndarray
    single_ray_verdict: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "cone_ranks": self.cone_ranks,
            "all_one_dimensional": self.all_one_dimensional,
            "S": self.S.tolist(),
            "S_positive_definite": self.S_positive_definite,
            "S_null_space": (None if self.S_null_space is None
                             else self.S_null_space.tolist()),
            "S_complement": self.S_complement.tolist(),
            "single_ray_verdict": self.single_ray_verdict,
        }


def excitation_report(normals, gradients=None, cone_ranks=None,
                      n: Optional[int] = None) -> IdentifiabilityReport:
    """Assemble S = sum_k A_k' P_k A_k with P_k = I - n_k n_k'.

    ``normals`` is a list of unit vectors or None (interior observation,
    P = I). ``gradients`` defaults to the identity for every observation.
    """
    if n is None:
        for nk in normals:
            if nk is not None:
                n = np.atleast_1d(np.asarray(nk, dtype=float)).shape[0]
                break
        if n is None and gradients:
            n = np.atleast_2d(np.asarray(gradients[0], dtype=float)).shape[1]
    if n is None:
        raise SpecificationError("cannot infer dimension from inputs")
    S = np.zeros((n, n))
    M = np.zeros((n, n))
    for k, nk in enumerate(normals):
        A = (np.eye(n) if gradients is None
             else np.atleast_2d(np.asarray(gradients[k], dtype=float)))
        if nk is None:
            P = np.eye(n)
            Mk = np.zeros((n, n))
        else:
            v = np.atleast_1d(np.asarray(nk, dtype=float))
            if abs(float(np.linalg.norm(v)) - 1.0) > 1e-9:
                raise SpecificationError(f"normal {k} is not unit length")
            P = np.eye(n) - np.outer(v, v)
            Mk = A.T @ np.outer(v, v) @ A
        S += A.T @ P @ A
        M += Mk
    pd = is_positive_definite(S, tol=1e-9)
    null = None if pd else null_space_basis(S)
    ranks = list(cone_ranks) if cone_ranks is not None else [
        0 if nk is None else 1 for nk in normals]
    return IdentifiabilityReport(
        cone_ranks=ranks,
        all_one_dimensional=all(r == 1 for r in ranks),
        S=S, S_positive_definite=pd, S_null_space=null, S_complement=M)


def stationarity_residual(region: PolyhedralRegion, z, theta,
                          tol: float = ACTIVE_TOL) -> float:
    """Distance from theta to the cone of normals active at z.

    min over lam >= 0 supported on the active set of ||theta - A_I' lam||.
    Empty active set forces lam = 0 and the residual ||theta||.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    idx = active_set(region, z, tol).indices
    if not idx:
        return float(np.linalg.norm(theta))
    G = region.A[list(idx), :]
    _, resid = nonneg_lstsq(G.T, theta)
    return float(resid)


def observation_aligned_parameter(pp: ParameterPolytope, centroid,
                                  tol: float = ACTIVE_TOL) -> np.ndarray:
    """theta minimizing theta'centroid over the polytope.

    Ties broken deterministically toward the earliest coordinates: fix the
    optimal value, then maximize theta_1, theta_2, ... in turn, so an
    exact tie lands on (1, 0, ...) when that vertex is available.
    """
    if pp.empty:
        raise SpecificationError("parameter polytope is empty")
    centroid = np.atleast_1d(np.asarray(centroid, dtype=float))
    blocks = [pp.generators]
    spec, n = _lifted_spec(centroid, blocks, pp.normalization)
    out = solve_lp(spec, tol=tol)
    if out.status != OPTIMAL:
        raise SpecificationError("alignment LP did not solve")
    # Sequential lexicographic refinement with the value pinned by extra
    # equality rows over the theta block.
    pins_A = [np.concatenate([centroid, np.zeros(spec.n - n)])]
    pins_b = [out.objective]
    theta = out.x[:n]
    for j in range(n):
        e = np.zeros(spec.n)
        e[j] = -1.0
        sub = LpSpec(c=e, eq_A=np.vstack([spec.eq_A, np.array(pins_A)]),
                     eq_b=np.concatenate([spec.eq_b, np.array(pins_b)]),
                     lower=spec.lower)
        res = solve_lp(sub, tol=tol)
        if res.status != OPTIMAL:
            break
        theta = res.x[:n]
        pins_A.append(e)
        pins_b.append(res.objective)
    return theta


def identifiability_report(points, region: PolyhedralRegion,
                           norm: NormalizationSet = NormalizationSet(),
                           tol: float = ACTIVE_TOL) -> IdentifiabilityReport:
    """Full diagnostic for a set of observed points in one region."""
    normals = []
    ranks = []
    for z in points:
        idx = active_set(region, z, tol).indices
        if not idx:
            normals.append(None)
            ranks.append(0)
            continue
        G = region.A[list(idx), :]
        ranks.append(rank(G))
        if len(idx) == 1:
            v = G[0] / np.linalg.norm(G[0])
            normals.append(v)
        else:
            # Multi-row active set: use the first normal as the excitation
            # direction; the rank list records the true cone dimension.
            v = G[0] / np.linalg.norm(G[0])
            normals.append(v)
    rep = excitation_report(normals, cone_ranks=ranks, n=region.n)
    rep.single_ray_verdict = is_single_ray(points, region, norm, tol)
    return rep
