"""Inverse-learning solvers.

All solvers share one engine: a deterministic combinatorial search over
constraint-activation patterns. Each pattern fixes a face of the region,
the loss minimizer over that face comes from the projection engine (or an
LP for the l1 loss), and a candidate counts only when the cone of normals
active at the minimizer meets the normalization set. Ties are broken by
the lexicographically smallest active index set, so results are
reproducible bit-for-bit.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import (
    InfeasibleError,
    NoRationalizableSolutionError,
    RealizabilityError,
    SpecificationError,
)
from .geometry import (
    ParameterPolytope,
    active_set,
    cone_meets_normalization,
    observation_aligned_parameter,
    parameter_polytope,
)
from .model import (
    L1,
    SQUARED,
    InverseProblem,
    ObservationSummary,
    total_loss,
    validate,
)
from .linalg import least_distance
from .simplex import OPTIMAL, LpSpec, solve_lp
from .projection import ProjectionSpec, project_point

ACTIVE_TOL = 1e-7
TIE_TOL = 1e-9


def default_epsilon(region) -> float:
    return 1e-4 * (1.0 + float(np.max(np.abs(region.b))))


@dataclass
class SearchStats:
    patterns_examined: int = 0
    patterns_pruned: int = 0
    projections: int = 0
    cone_checks: int = 0


@dataclass
class IlSolution:
    point: np.ndarray
    loss: float
    active: tuple
    theta: np.ndarray
    polytope: ParameterPolytope
    stats: SearchStats
    chosen_relevant: Optional[tuple] = None
    chosen_trivial: Optional[tuple] = None
    score: Optional[float] = None
    r: Optional[int] = None


@dataclass(frozen=True)
class GilConfig:
    r: int
    omega: float = 1.0
    epsilon: Optional[float] = None
    mode: str = "best-first"

    def __post_init__(self):
        if self.r < 1:
            raise SpecificationError("cardinality r must be >= 1")
        if not 0.0 <= self.omega <= 1.0:
            raise SpecificationError("omega must lie in [0, 1]")
        if self.mode not in ("exhaustive", "best-first"):
            raise SpecificationError(f"unknown search mode {self.mode!r}")


@dataclass
class StepRecord:
    index: int
    point: np.ndarray
    loss: float
    delta_loss: float
    active_relevant: tuple
    theta: np.ndarray
    newly_activated: tuple = ()
    score: Optional[float] = None


@dataclass
class TradeoffTrace:
    steps: list = field(default_factory=list)
    termination: str = "face-exhausted"
    rejected_step: Optional[StepRecord] = None


class _FaceEngine:
    """Shared per-problem machinery: face projections and cone checks."""

    def __init__(self, problem: InverseProblem, tol: float = ACTIVE_TOL):
        self.problem = problem
        self.region = problem.region
        self.tol = tol
        self.stats = SearchStats()
        self._cone_cache: dict = {}
        self._l1_breaks = None
        self.l1_row_bounds = None
        if problem.loss == L1:
            pts = problem.observations.points
            if pts is None:
                raise SpecificationError("l1 loss requires retained points")
            self._l1_breaks = [np.unique(pts[:, j]) for j in range(pts.shape[1])]
            # Per-row lower bound on the face loss: forcing row i tight
            # costs at least sum_k |a_i'x^k - b_i| / ||a_i||_inf in l1.
            A, b = self.region.A, self.region.b
            gaps = np.abs(pts @ A.T - b).sum(axis=0)
            self.l1_row_bounds = gaps / np.max(np.abs(A), axis=1)

    def cone_ok(self, indices) -> bool:
        key = frozenset(indices)
        if key not in self._cone_cache:
            self.stats.cone_checks += 1
            if not key:
                self._cone_cache[key] = None
            else:
                G = self.region.A[sorted(key), :]
                self._cone_cache[key] = cone_meets_normalization(
                    G, self.problem.normalization, self.tol)
        return self._cone_cache[key] is not None

    def face_minimizer(self, eq_idx, strict_idx=(), epsilon=0.0):
        """Loss minimizer over face(eq_idx) ∩ Ω with strict rows slack.

        Returns (z, d2) where d2 is the squared distance to the centroid
        (squared loss) or the total l1 loss, or None when the system is
        infeasible.
        """
        region = self.region
        eq_idx = sorted(eq_idx)
        other = [i for i in range(region.m) if i not in eq_idx]
        b_other = region.b[other].copy()
        for pos, i in enumerate(other):
            if i in strict_idx:
                b_other[pos] += epsilon
        self.stats.projections += 1
        if self.problem.loss == SQUARED:
            # The affine-hull minimizer is the face minimizer whenever it
            # already satisfies the remaining rows; this skips the QP (and
            # its Phase-I LP) for the common case.
            centroid = self.problem.observations.centroid
            if eq_idx:
                A = region.A[eq_idx, :]
                b = region.b[eq_idx]
                u, *_ = np.linalg.lstsq(A @ A.T, A @ centroid - b,
                                        rcond=None)
                z_aff = centroid - A.T @ u
                consistent = float(np.max(np.abs(A @ z_aff - b))) <= 1e-7
            else:
                z_aff = centroid
                consistent = True
            if not consistent:
                return None  # equalities contradict: empty face
            if not other or float(np.min(
                    region.A[other, :] @ z_aff - b_other)) >= -1e-9:
                d = z_aff - centroid
                return z_aff, float(d @ d)
            # Least-distance form: minimize ||w|| over the constraint set
            # shifted by the centroid, with equalities folded as opposing
            # inequality pairs. One nonnegative-least-squares solve.
            G_rows, h_rows = [], []
            if eq_idx:
                A_eq, b_eq = region.A[eq_idx, :], region.b[eq_idx]
                G_rows += [A_eq, -A_eq]
                h_rows += [b_eq, -b_eq]
            if other:
                G_rows.append(region.A[other, :])
                h_rows.append(b_other)
            G_sys = np.vstack(G_rows)
            h_sys = np.concatenate(h_rows)
            w = least_distance(G_sys, h_sys - G_sys @ centroid)
            if w is None:
                return None
            return centroid + w, float(w @ w)
        return self._l1_face_minimizer(eq_idx, other, b_other)

    def _l1_face_minimizer(self, eq_idx, other, b_other):
        """LP over (z, t): t_j bounds the per-coordinate l1 deviation.

        Each coordinate's deviation sum is convex piecewise-linear with
        breakpoints at the distinct observed values; one supporting line
        per segment keeps the tableau small.
        """
        region = self.region
        pts = self.problem.observations.points
        K, n = pts.shape
        nv = 2 * n  # z then t
        ineq_rows, ineq_rhs = [], []
        for j in range(n):
            vals = self._l1_breaks[j]
            col = pts[:, j]
            # Segment slopes: left ray plus one per breakpoint's right side.
            seg_points = [vals[0]] + list(vals)
            seg_slopes = [-float(K)]
            for v in vals:
                seg_slopes.append(float(np.sum(col <= v) - np.sum(col > v)))
            for v, s in zip(seg_points, seg_slopes):
                fv = float(np.sum(np.abs(col - v)))
                # t_j >= fv + s*(z_j - v)  <=>  t_j - s*z_j >= fv - s*v
                row = np.zeros(nv)
                row[n + j] = 1.0
                row[j] = -s
                ineq_rows.append(row)
                ineq_rhs.append(fv - s * v)
        for pos, i in enumerate(other):
            row = np.zeros(nv)
            row[:n] = region.A[i, :]
            ineq_rows.append(row)
            ineq_rhs.append(b_other[pos])
        eq_rows, eq_rhs = [], []
        for i in eq_idx:
            row = np.zeros(nv)
            row[:n] = region.A[i, :]
            eq_rows.append(row)
            eq_rhs.append(region.b[i])
        c = np.zeros(nv)
        c[n:] = 1.0
        out = solve_lp(LpSpec(
            c=c,
            eq_A=np.array(eq_rows) if eq_rows else None,
            eq_b=np.array(eq_rhs) if eq_rows else None,
            ineq_A=np.array(ineq_rows), ineq_b=np.array(ineq_rhs)),
            tol=self.tol)
        if out.status != OPTIMAL:
            return None
        return out.x[:n], float(out.objective)

    def realized_active(self, z) -> tuple:
        return active_set(self.region, z, self.tol).indices

    def report_loss(self, z, d2: float) -> float:
        if self.problem.loss == SQUARED:
            obs = self.problem.observations
            return obs.count * d2 + obs.c2
        return d2


def _finish_solution(engine: _FaceEngine, z, loss, realized) -> IlSolution:
    problem = engine.problem
    pp = parameter_polytope(problem.region, z, problem.normalization,
                            engine.tol)
    theta = observation_aligned_parameter(pp, problem.observations.centroid,
                                          engine.tol)
    return IlSolution(point=z, loss=loss, active=realized, theta=theta,
                      polytope=pp, stats=engine.stats)


def _affine_bound(region, centroid, pattern) -> float:
    """Squared distance from the centroid to the pattern's affine hull.

    A lower bound on the face distance, monotone under pattern supersets.
    """
    A = region.A[list(pattern), :]
    b = region.b[list(pattern)]
    u, *_ = np.linalg.lstsq(A @ A.T, A @ centroid - b, rcond=None)
    z = centroid - A.T @ u
    resid = A @ z - b
    if float(np.max(np.abs(resid))) > 1e-7:
        return np.inf  # inconsistent equalities: empty affine hull
    d = z - centroid
    return float(d @ d)


def solve_il(problem: InverseProblem, mode: str = "best-first",
             tol: float = ACTIVE_TOL) -> IlSolution:
    """Representative-solution recovery.

    Minimizes the aggregate loss over all feasible points whose active
    normal cone meets the normalization set. Exhaustive mode enumerates
    every activation pattern of size 1..n; best-first explores patterns in
    order of an affine-hull distance bound and prunes dominated branches.
    Both modes return identical results.
    """
    findings = validate(problem)
    if findings:
        raise SpecificationError("; ".join(findings))
    if mode not in ("exhaustive", "best-first"):
        raise SpecificationError(f"unknown search mode {mode!r}")
    engine = _FaceEngine(problem, tol)
    region = problem.region
    max_size = min(region.n, region.m)

    best = None  # (d2, realized tuple, z)

    def consider(pattern):
        # Only called on cone-valid patterns; the minimizer's realized
        # active set contains the pattern, so its cone is valid too.
        nonlocal best
        res = engine.face_minimizer(pattern)
        if res is None:
            return False
        z, d2 = res
        realized = engine.realized_active(z)
        cand = (d2, realized, z)
        if best is None or d2 < best[0] - TIE_TOL or (
                abs(d2 - best[0]) <= TIE_TOL and realized < best[1]):
            best = cand
        return True

    # Only patterns whose own cone meets the normalization set need a face
    # projection: if an optimal point's realized active set S rationalizes
    # it, then cone(S) meets the set, some subset of S of size <= n does
    # too (Caratheodory), and that subset's face minimizer is no worse and
    # stays rationalizable (its realized set contains the subset). Invalid
    # patterns are still expanded, since supersets can become valid.
    if mode == "exhaustive":
        for size in range(1, max_size + 1):
            for pattern in itertools.combinations(range(region.m), size):
                engine.stats.patterns_examined += 1
                if engine.cone_ok(pattern):
                    consider(pattern)
    else:
        # Fast path: if the unconstrained-over-Omega minimizer is already
        # rationalizable, it is the global optimum.
        engine.stats.patterns_examined += 1
        free = engine.face_minimizer(())
        if free is not None:
            z0, d0 = free
            realized0 = engine.realized_active(z0)
            if engine.cone_ok(realized0):
                return _finish_solution(engine, z0,
                                        engine.report_loss(z0, d0), realized0)
        centroid = problem.observations.centroid
        if problem.loss == L1:
            def bound_of(pattern):
                return float(np.max(engine.l1_row_bounds[list(pattern)]))
        else:
            def bound_of(pattern):
                return _affine_bound(region, centroid, pattern)
        heap = []
        for i in range(region.m):
            bound = bound_of((i,))
            if np.isfinite(bound):
                heapq.heappush(heap, (bound, (i,), False))
        seen = set()
        while heap:
            bound, pattern, inherited = heapq.heappop(heap)
            if best is not None and bound > best[0] + TIE_TOL:
                engine.stats.patterns_pruned += len(heap) + 1
                break
            if pattern in seen:
                continue
            seen.add(pattern)
            engine.stats.patterns_examined += 1
            # Cone validity is monotone: a superset's cone contains the
            # subset's, so children of a valid pattern are valid without
            # another check.
            valid = inherited or engine.cone_ok(pattern)
            if valid:
                feasible = consider(pattern)
                if not feasible:
                    continue  # empty face: every superset is empty too
                if problem.loss == SQUARED:
                    # Supersets have shrinking faces, so their (unique)
                    # minimizers are never closer; at equal distance they
                    # coincide with this one. Nothing new down this branch.
                    continue
            if len(pattern) >= max_size:
                continue
            if not valid:
                # Children only ever add rows past max(pattern); if even
                # the cone over all of them stays outside the
                # normalization set, no descendant can become valid.
                tail = tuple(range(pattern[-1] + 1, region.m))
                if not tail or not engine.cone_ok(pattern + tail):
                    continue
            for j in range(pattern[-1] + 1, region.m):
                child = pattern + (j,)
                cb = bound_of(child)
                if not np.isfinite(cb):
                    continue
                if best is not None and cb > best[0] + TIE_TOL:
                    engine.stats.patterns_pruned += 1
                    continue
                heapq.heappush(heap, (cb, child, valid))

    if best is None:
        raise NoRationalizableSolutionError(
            "no activation pattern admits a normalized parameter")
    d2, realized, z = best
    return _finish_solution(engine, z, engine.report_loss(z, d2), realized)


def _score_and_tiebreak(candidates):
    """Pick min score; ties by (sorted relevant set, sorted trivial set)."""
    best = None
    for score, s_r, s_t, z, loss, realized in candidates:
        key = (tuple(sorted(s_r)), tuple(sorted(s_t)))
        if best is None or score < best[0] - TIE_TOL or (
                abs(score - best[0]) <= TIE_TOL and key < best[1]):
            best = (score, key, z, loss, realized, s_r, s_t)
    return best


def solve_gil(problem: InverseProblem, cfg: GilConfig,
              tol: float = ACTIVE_TOL) -> IlSolution:
    """Goal-integrated recovery with exactly r relevant rows binding.

    Score = omega * loss - (1 - omega) * |chosen ∩ preferred|; inactive
    relevant rows are held strictly slack by epsilon.
    """
    findings = validate(problem)
    if findings:
        raise SpecificationError("; ".join(findings))
    hier = problem.hierarchy
    R = sorted(hier.relevant)
    P = hier.preferred
    T = sorted(hier.trivial)
    n = problem.region.n
    if cfg.r > min(len(R), n):
        raise SpecificationError("r exceeds min(|relevant|, dimension)")
    eps = cfg.epsilon if cfg.epsilon is not None else default_epsilon(
        problem.region)
    engine = _FaceEngine(problem, tol)

    obs = problem.observations
    if problem.loss == SQUARED:
        def loss_bound(s_r):
            return obs.count * _affine_bound(problem.region, obs.centroid,
                                             s_r) + obs.c2
    else:
        def loss_bound(s_r):
            return float(np.max(engine.l1_row_bounds[list(s_r)]))

    combos = list(itertools.combinations(R, cfg.r))
    if cfg.mode != "exhaustive":
        # Knowing r lets the search visit combos in bound order and stop
        # examining any whose optimistic score already loses.
        combos.sort(key=lambda s_r: loss_bound(s_r))

    candidates = []
    best_score = np.inf
    any_feasible = False
    for s_r in combos:
        if cfg.mode != "exhaustive" and candidates:
            optimistic = (cfg.omega * loss_bound(s_r)
                          - (1.0 - cfg.omega) * len(set(s_r) & P))
            if optimistic > best_score + 1e-9:
                engine.stats.patterns_pruned += 1
                continue
        strict = [i for i in R if i not in s_r]
        if cfg.mode == "exhaustive":
            trivial_subsets = [()] + [
                st for size in range(1, max(0, n - cfg.r) + 1)
                for st in itertools.combinations(T, size)]
        else:
            trivial_subsets = [()]
        for s_t in trivial_subsets:
            engine.stats.patterns_examined += 1
            res = engine.face_minimizer(tuple(s_r) + tuple(s_t),
                                        strict_idx=strict, epsilon=eps)
            if res is None:
                continue
            z, d2 = res
            any_feasible = True
            realized = engine.realized_active(z)
            if not engine.cone_ok(realized):
                continue
            loss = engine.report_loss(z, d2)
            score = cfg.omega * loss - (1.0 - cfg.omega) * len(set(s_r) & P)
            candidates.append((score, s_r, s_t, z, loss, realized))
            best_score = min(best_score, score)

    if not candidates:
        blocking = []
        for i in R:
            if engine.face_minimizer((i,)) is None:
                blocking.append(i)
        msg = ("no size-r relevant subset is realizable"
               if any_feasible else "no size-r relevant subset is feasible")
        raise RealizabilityError(msg, blocking=blocking)

    score, key, z, loss, realized, s_r, s_t = _score_and_tiebreak(candidates)
    sol = _finish_solution(engine, z, loss, realized)
    sol.chosen_relevant = tuple(sorted(s_r))
    sol.chosen_trivial = tuple(sorted(s_t))
    sol.score = score
    sol.r = cfg.r
    return sol


def solve_mgil_step(problem: InverseProblem, prev_active, omega: float = 1.0,
                    preferred=None, epsilon: Optional[float] = None,
                    index: int = 1, prev_loss: float = 0.0,
                    mode: str = "best-first",
                    tol: float = ACTIVE_TOL) -> Optional[StepRecord]:
    """One sequential augmentation step.

    Inherits every previously active relevant row, activates at least one
    new relevant row (smallest increment first), and returns the
    best-scoring record — or None when no augmentation is feasible.
    """
    hier = problem.hierarchy
    R = sorted(hier.relevant)
    P = set(preferred) if preferred is not None else set(hier.preferred)
    T = sorted(hier.trivial)
    prev = tuple(sorted(set(prev_active)))
    remaining = [i for i in R if i not in prev]
    if not remaining:
        return None
    n = problem.region.n
    eps = epsilon if epsilon is not None else default_epsilon(problem.region)
    engine = _FaceEngine(problem, tol)

    candidates = []
    max_new = min(len(remaining), n)
    for size in range(1, max_new + 1):
        for delta in itertools.combinations(remaining, size):
            eq = prev + delta
            strict = [i for i in R if i not in eq]
            trivial_subsets = [()]
            if mode == "exhaustive":
                room = max(0, n - len(eq))
                trivial_subsets = [()] + [
                    st for sz in range(1, room + 1)
                    for st in itertools.combinations(T, sz)]
            for s_t in trivial_subsets:
                engine.stats.patterns_examined += 1
                res = engine.face_minimizer(eq + tuple(s_t),
                                            strict_idx=strict, epsilon=eps)
                if res is None:
                    continue
                z, d2 = res
                realized = engine.realized_active(z)
                if not engine.cone_ok(realized):
                    continue
                loss = engine.report_loss(z, d2)
                score = omega * loss - (1.0 - omega) * len(set(delta) & P)
                candidates.append((score, delta, s_t, z, loss, realized))
        if candidates and mode != "exhaustive" and omega >= 1.0:
            # With omega = 1 the loss only grows as more rows are forced
            # active, so the smallest feasible increment already wins.
            break

    if not candidates:
        return None
    score, key, z, loss, realized, delta, s_t = _score_and_tiebreak(candidates)
    pp = parameter_polytope(problem.region, z, problem.normalization, tol)
    theta = observation_aligned_parameter(pp, problem.observations.centroid,
                                          tol)
    active_rel = tuple(sorted(set(prev) | set(delta)))
    return StepRecord(index=index, point=z, loss=loss,
                      delta_loss=loss - prev_loss,
                      active_relevant=active_rel, theta=theta,
                      newly_activated=tuple(sorted(delta)), score=score)


def run_mgil(problem: InverseProblem, L_max: int = 10, omega: float = 1.0,
             tau: float = np.inf, epsilon: Optional[float] = None,
             mode: str = "best-first", tol: float = ACTIVE_TOL) -> TradeoffTrace:
    """Sequential tradeoff navigation (step 0 is the plain IL solution).

    Stops on the iteration cap, when every relevant row that can bind does,
    when a step's marginal cost exceeds tau (that step is reported but not
    accepted), or when no augmentation is feasible.
    """
    trace = TradeoffTrace()
    il = solve_il(problem, mode=mode, tol=tol)
    active_rel = tuple(sorted(set(il.active) & problem.hierarchy.relevant))
    trace.steps.append(StepRecord(
        index=0, point=il.point, loss=il.loss, delta_loss=0.0,
        active_relevant=active_rel, theta=il.theta,
        newly_activated=active_rel))
    R = problem.hierarchy.relevant
    limit = min(len(R), problem.region.n)
    for ell in range(1, L_max + 1):
        prev = trace.steps[-1]
        if len(prev.active_relevant) >= limit:
            trace.termination = "face-exhausted"
            return trace
        step = solve_mgil_step(problem, prev.active_relevant, omega=omega,
                               epsilon=epsilon, index=ell,
                               prev_loss=prev.loss, mode=mode, tol=tol)
        if step is None:
            trace.termination = "face-exhausted"
            return trace
        if step.delta_loss > tau:
            trace.termination = "threshold-exceeded"
            trace.rejected_step = step
            return trace
        trace.steps.append(step)
    trace.termination = "max-iterations"
    return trace


@dataclass
class BaselineResult:
    theta: np.ndarray
    forward_point: np.ndarray
    projections: np.ndarray
    loss: float
    candidates_tried: int


def _theta_vertices(region, norm, count, rng):
    """theta-vertices of {theta = A'lam, lam >= 0, theta in Theta}."""
    from .geometry import _lifted_spec
    verts = []
    for _ in range(count):
        spec, n = _lifted_spec(rng.normal(size=region.n), [region.A], norm)
        out = solve_lp(spec)
        if out.status == OPTIMAL:
            verts.append(out.x[:n])
    return verts


def solve_ilo_baseline(problem: InverseProblem, vertex_samples: int = 10,
                       seed: int = 0, tol: float = ACTIVE_TOL) -> BaselineResult:
    """Classical recover-then-project baseline via LP decomposition.

    Candidate parameters are the region rows that normalize into the
    simplex plus vertices of the lifted compatibility polytope found by
    random-objective LPs. Each candidate is scored by projecting every raw
    observation onto the candidate's optimal face.
    """
    obs = problem.observations
    if obs.points is None:
        raise SpecificationError("baseline requires retained raw points")
    region = problem.region
    norm = problem.normalization
    rng = np.random.default_rng(seed)

    candidates = []
    for i in range(region.m):
        a = region.A[i, :]
        s = float(np.sum(a))
        if np.all(a >= -1e-12) and s > 1e-12:
            candidates.append(a / s)
    candidates.extend(_theta_vertices(region, norm, vertex_samples, rng))
    # Dedupe to avoid re-solving identical forward problems.
    unique = []
    for t in candidates:
        if not any(np.linalg.norm(t - u) <= 1e-9 for u in unique):
            unique.append(t)
    if not unique:
        raise NoRationalizableSolutionError(
            "no candidate parameter normalizes into the simplex")

    best = None
    for theta in unique:
        fwd = solve_lp(LpSpec(c=theta, ineq_A=region.A, ineq_b=region.b),
                       tol=tol)
        if fwd.status != OPTIMAL:
            continue
        value = fwd.objective
        projections = []
        loss = 0.0
        ok = True
        for x in obs.points:
            try:
                if problem.loss == SQUARED:
                    res = project_point(ProjectionSpec(
                        target=x, eq_A=theta.reshape(1, -1),
                        eq_b=[value], ineq_A=region.A, ineq_b=region.b),
                        tol=tol)
                    projections.append(res.point)
                    loss += res.sq_distance
                else:
                    zk = _l1_point_projection(region, theta, value, x, tol)
                    if zk is None:
                        ok = False
                        break
                    projections.append(zk)
                    loss += float(np.sum(np.abs(x - zk)))
            except InfeasibleError:
                ok = False
                break
        if not ok:
            continue
        if best is None or loss < best.loss - TIE_TOL:
            best = BaselineResult(theta=theta, forward_point=fwd.x,
                                  projections=np.array(projections),
                                  loss=loss, candidates_tried=len(unique))
    if best is None:
        raise NoRationalizableSolutionError(
            "no candidate parameter yields a solvable forward problem")
    return best


def _l1_point_projection(region, theta, value, x, tol):
    """min ||x - z||_1 over the optimal face {z in Omega: theta'z = value}."""
    n = region.n
    nv = 2 * n
    c = np.zeros(nv)
    c[n:] = 1.0
    ineq_rows = []
    ineq_rhs = []
    for i in range(region.m):
        row = np.zeros(nv)
        row[:n] = region.A[i, :]
        ineq_rows.append(row)
        ineq_rhs.append(region.b[i])
    for j in range(n):
        up = np.zeros(nv)
        up[n + j] = 1.0
        up[j] = -1.0
        ineq_rows.append(up)
        ineq_rhs.append(-x[j])
        dn = np.zeros(nv)
        dn[n + j] = 1.0
        dn[j] = 1.0
        ineq_rows.append(dn)
        ineq_rhs.append(x[j])
    eq = np.zeros((1, nv))
    eq[0, :n] = theta
    out = solve_lp(LpSpec(c=c, eq_A=eq, eq_b=[value],
                          ineq_A=np.array(ineq_rows),
                          ineq_b=np.array(ineq_rhs)), tol=tol)
    if out.status != OPTIMAL:
        return None
    return out.x[:n]


def brute_force_oracle(problem: InverseProblem,
                       tol: float = ACTIVE_TOL) -> IlSolution:
    """Ground-truth reference: plain enumeration, no pruning, no caching."""
    region = problem.region
    if region.n > 4 or region.m > 10:
        raise SpecificationError("oracle limited to n <= 4, m <= 10")
    findings = validate(problem)
    if findings:
        raise SpecificationError("; ".join(findings))
    engine = _FaceEngine(problem, tol)
    results = []
    for size in range(1, min(region.n, region.m) + 1):
        for pattern in itertools.combinations(range(region.m), size):
            engine.stats.patterns_examined += 1
            res = engine.face_minimizer(pattern)
            if res is None:
                continue
            z, d2 = res
            realized = engine.realized_active(z)
            generators = region.A[list(realized), :] if realized else None
            if generators is None or cone_meets_normalization(
                    generators, problem.normalization, tol) is None:
                continue
            results.append((d2, realized, z))
    if not results:
        raise NoRationalizableSolutionError(
            "no activation pattern admits a normalized parameter")
    best_d2 = min(t[0] for t in results)
    tied = [t for t in results if t[0] <= best_d2 + TIE_TOL]
    d2, realized, z = min(tied, key=lambda t: t[1])
    return _finish_solution(engine, z, engine.report_loss(z, d2), realized)
