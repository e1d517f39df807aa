"""Seeded synthetic benchmark: instance generation, batch runs, metrics.

Two data-generating scenarios are supported. In the first a single latent
optimal point exists and observations are noisy copies of it; in the
second each observation is drawn from the optimal face of a randomly
drawn parameter. Batches emit a metrics CSV plus a JSON summary.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GenerationError, InvlearnError
from .geometry import active_set, cone_contains
from .model import (
    BOX,
    SQUARED,
    STRUCTURAL,
    ConstraintHierarchy,
    InverseProblem,
    ObservationSummary,
    PolyhedralRegion,
    total_loss,
)
from .simplex import OPTIMAL, LpSpec, solve_lp
from .solvers import (
    GilConfig,
    run_mgil,
    solve_gil,
    solve_il,
    solve_ilo_baseline,
    solve_mgil_step,
)

IL_ASSUMPTION = "il-assumption"
IO_ASSUMPTION = "io-assumption"

BOX_HALF_WIDTH = 10.0

CSV_HEADER = ["instance", "model", "r", "scenario", "noise", "knowledge",
              "distance", "recovered", "seconds"]


@dataclass(frozen=True)
class InstanceSpec:
    seed: int
    n: int = 10
    relevant_rows: int = 10
    scenario: str = IL_ASSUMPTION
    binding_level: int = 1
    noise_fraction: float = 0.0
    k_range: tuple = (2, 8)
    knowledge: int = 0

    def __post_init__(self):
        if self.scenario not in (IL_ASSUMPTION, IO_ASSUMPTION):
            raise GenerationError(f"unknown scenario {self.scenario!r}")
        if self.binding_level > self.n:
            raise GenerationError("binding level exceeds dimension")
        if self.binding_level > self.relevant_rows:
            raise GenerationError("binding level exceeds relevant row count")
        if self.noise_fraction < 0:
            raise GenerationError("noise fraction must be nonnegative")

    @property
    def instance_id(self) -> str:
        return (f"{self.scenario}-n{self.n}-b{self.binding_level}"
                f"-noise{self.noise_fraction:g}-k{self.knowledge}"
                f"-seed{self.seed}")


@dataclass
class GeneratedInstance:
    spec: InstanceSpec
    problem: InverseProblem
    x_star: np.ndarray
    theta_star: np.ndarray
    binding_set: tuple
    x_star_per_obs: Optional[np.ndarray] = None


def _box_rows(n):
    A = np.vstack([np.eye(n), -np.eye(n)])
    b = np.full(2 * n, -BOX_HALF_WIDTH)
    return A, b


def _unit_rows(rng, count, n):
    rows = rng.normal(size=(count, n))
    rows /= np.linalg.norm(rows, axis=1, keepdims=True)
    return rows


def generate_instance(spec: InstanceSpec, retries: int = 100) -> GeneratedInstance:
    """Deterministic-in-seed instance construction.

    Box rows are appended as trivial; relevant rows carry unit Gaussian
    normals. The first scenario plants a latent point on a compatible face
    and perturbs it; the second draws a parameter, solves the forward
    problem, and samples its optimal face.
    """
    rng = np.random.default_rng(spec.seed)
    for _ in range(retries):
        try:
            return _try_generate(spec, rng)
        except _RetryDraw:
            continue
    raise GenerationError(
        f"instance generation exhausted {retries} redraws for {spec.instance_id}")


class _RetryDraw(Exception):
    pass


def _try_generate(spec: InstanceSpec, rng) -> GeneratedInstance:
    n = spec.n
    m_rel = spec.relevant_rows
    box_A, box_b = _box_rows(n)
    sigma = spec.noise_fraction * 2 * BOX_HALF_WIDTH * np.sqrt(n)
    K = int(rng.integers(spec.k_range[0], spec.k_range[1] + 1))

    if spec.scenario == IL_ASSUMPTION:
        # Build the binding rows so their cone provably contains a simplex
        # parameter: the last binding normal closes a positive combination.
        theta_star = rng.dirichlet(np.ones(n))
        lam = rng.uniform(0.5, 2.0, size=spec.binding_level)
        binding = _unit_rows(rng, spec.binding_level, n)
        if spec.binding_level >= 1:
            partial = (lam[:-1, None] * binding[:-1]).sum(axis=0)
            last = (theta_star - partial) / lam[-1]
            norm = float(np.linalg.norm(last))
            if norm <= 1e-9:
                raise _RetryDraw
            binding[-1] = last / norm
        slack_rows = _unit_rows(rng, m_rel - spec.binding_level, n)
        rel_A = np.vstack([binding, slack_rows]) if slack_rows.size else binding
        order = rng.permutation(m_rel)
        rel_A = rel_A[order]
        binding_idx = tuple(sorted(int(np.flatnonzero(order == i)[0])
                                   for i in range(spec.binding_level)))
        x_star = rng.uniform(-0.6 * BOX_HALF_WIDTH, 0.6 * BOX_HALF_WIDTH,
                             size=n)
        rel_b = rel_A @ x_star
        for i in range(m_rel):
            if i not in binding_idx:
                rel_b[i] -= rng.uniform(0.5, 3.0)
        region = PolyhedralRegion(
            A=np.vstack([rel_A, box_A]),
            b=np.concatenate([rel_b, box_b]),
            labels=tuple([STRUCTURAL] * m_rel + [BOX] * (2 * n)))
        if active_set(region, x_star).indices != binding_idx:
            raise _RetryDraw  # an unplanned row happens to be tight
        points = x_star[None, :] + rng.normal(size=(K, n)) * sigma
        per_obs = None
    else:
        theta_star = rng.dirichlet(np.ones(n))
        rel_A = _unit_rows(rng, m_rel, n)
        anchor = rng.uniform(-0.5 * BOX_HALF_WIDTH, 0.5 * BOX_HALF_WIDTH,
                             size=n)
        rel_b = rel_A @ anchor - rng.uniform(0.5, 3.0, size=m_rel)
        region = PolyhedralRegion(
            A=np.vstack([rel_A, box_A]),
            b=np.concatenate([rel_b, box_b]),
            labels=tuple([STRUCTURAL] * m_rel + [BOX] * (2 * n)))
        fwd = solve_lp(LpSpec(c=theta_star, ineq_A=region.A, ineq_b=region.b))
        if fwd.status != OPTIMAL:
            raise _RetryDraw
        value = fwd.objective
        # Vertices of the optimal face from random objectives, mixed with
        # Dirichlet weights to spread samples over the face.
        verts = []
        for _ in range(max(3, spec.binding_level)):
            out = solve_lp(LpSpec(c=rng.normal(size=n),
                                  eq_A=theta_star.reshape(1, -1),
                                  eq_b=[value],
                                  ineq_A=region.A, ineq_b=region.b))
            if out.status == OPTIMAL:
                verts.append(out.x)
        if not verts:
            raise _RetryDraw
        verts = np.array(verts)
        weights = rng.dirichlet(np.ones(verts.shape[0]), size=K)
        per_obs = weights @ verts
        points = per_obs + rng.normal(size=(K, n)) * sigma
        x_star = per_obs.mean(axis=0)
        binding_idx = active_set(region, x_star).indices

    relevant = frozenset(range(m_rel))
    truly_binding_rel = [i for i in binding_idx if i < m_rel]
    preferred = frozenset(truly_binding_rel[:spec.knowledge])
    problem = InverseProblem(
        region=region,
        hierarchy=ConstraintHierarchy(relevant=relevant, preferred=preferred,
                                      m=region.m),
        observations=ObservationSummary.from_points(points),
        loss=SQUARED)
    return GeneratedInstance(spec=spec, problem=problem, x_star=x_star,
                             theta_star=theta_star,
                             binding_set=tuple(binding_idx),
                             x_star_per_obs=per_obs)


def evaluate_recovery(instance: GeneratedInstance, z) -> bool:
    """True iff the true parameter lies in the cone of rows active at z."""
    idx = active_set(instance.problem.region, z).indices
    if not idx:
        return False
    G = instance.problem.region.A[list(idx), :]
    return cone_contains(G, instance.theta_star)


@dataclass
class MetricsRow:
    instance: str
    model: str
    r: Optional[int]
    scenario: str
    noise: float
    knowledge: int
    distance: Optional[float]
    recovered: Optional[bool]
    seconds: float
    error: Optional[str] = None

    def as_csv(self) -> list:
        return [self.instance, self.model,
                "" if self.r is None else self.r,
                self.scenario, f"{self.noise:g}", self.knowledge,
                "" if self.distance is None else f"{self.distance:.12g}",
                "" if self.recovered is None else int(self.recovered),
                f"{self.seconds:.6f}"]


def _parse_model(model: str):
    if ":" in model:
        name, r = model.split(":", 1)
        return name, int(r)
    return model, None


def run_model(instance: GeneratedInstance, model: str,
              vertex_samples: int = 10):
    """Solve one instance with one model; returns (point, seconds, r).

    For the sequential model only the incremental steps are timed — the
    step-0 solution is treated as already available, which is how the
    navigator consumes it.
    """
    name, r = _parse_model(model)
    problem = instance.problem
    if name == "il":
        t0 = time.perf_counter()
        sol = solve_il(problem)
        return sol.point, time.perf_counter() - t0, None
    if name == "gil":
        if r is None:
            r = max(1, len(instance.binding_set) or 1)
        t0 = time.perf_counter()
        sol = solve_gil(problem, GilConfig(r=r))
        return sol.point, time.perf_counter() - t0, r
    if name == "mgil":
        if r is None:
            r = max(1, len(instance.binding_set) or 1)
        base = solve_il(problem)
        prev = tuple(sorted(set(base.active) & problem.hierarchy.relevant))
        point = base.point
        loss = base.loss
        elapsed = 0.0
        while len(prev) < r:
            t0 = time.perf_counter()
            step = solve_mgil_step(problem, prev, prev_loss=loss,
                                   preferred=problem.hierarchy.preferred)
            elapsed += time.perf_counter() - t0
            if step is None:
                break
            prev = step.active_relevant
            point = step.point
            loss = step.loss
        return point, elapsed, r
    if name == "baseline":
        t0 = time.perf_counter()
        res = solve_ilo_baseline(problem, vertex_samples=vertex_samples,
                                 seed=instance.spec.seed)
        return res.forward_point, time.perf_counter() - t0, None
    raise GenerationError(f"unknown model {model!r}")


def run_batch(specs, models, vertex_samples: int = 10) -> list:
    """One MetricsRow per (instance, model); failures never abort the batch."""
    rows = []
    for spec in specs:
        try:
            inst = generate_instance(spec)
        except GenerationError as exc:
            for model in models:
                name, r = _parse_model(model)
                rows.append(MetricsRow(
                    instance=spec.instance_id, model=name, r=r,
                    scenario=spec.scenario, noise=spec.noise_fraction,
                    knowledge=spec.knowledge, distance=None, recovered=None,
                    seconds=0.0, error=str(exc)))
            continue
        for model in models:
            name, r = _parse_model(model)
            try:
                point, seconds, used_r = run_model(inst, model,
                                                   vertex_samples)
                dist = float(np.linalg.norm(point - inst.x_star))
                rec = evaluate_recovery(inst, point)
                rows.append(MetricsRow(
                    instance=spec.instance_id, model=name,
                    r=used_r if used_r is not None else r,
                    scenario=spec.scenario, noise=spec.noise_fraction,
                    knowledge=spec.knowledge, distance=dist, recovered=rec,
                    seconds=seconds))
            except InvlearnError as exc:
                rows.append(MetricsRow(
                    instance=spec.instance_id, model=name, r=r,
                    scenario=spec.scenario, noise=spec.noise_fraction,
                    knowledge=spec.knowledge, distance=None, recovered=None,
                    seconds=0.0, error=str(exc)))
    return rows


def metrics_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.as_csv())
    return buf.getvalue()


def summarize(rows) -> dict:
    """Mean/quartile aggregates per (model, scenario, noise) configuration."""
    groups: dict = {}
    failures = []
    for row in rows:
        if row.error is not None:
            failures.append({"instance": row.instance, "model": row.model,
                             "error": row.error})
            continue
        key = (row.model, row.scenario, f"{row.noise:g}")
        groups.setdefault(key, []).append(row)
    configs = []
    for (model, scenario, noise), members in sorted(groups.items()):
        dists = np.array([m.distance for m in members])
        secs = np.array([m.seconds for m in members])
        configs.append({
            "model": model, "scenario": scenario, "noise": float(noise),
            "count": len(members),
            "distance": {"mean": float(dists.mean()),
                         "q1": float(np.percentile(dists, 25)),
                         "median": float(np.median(dists)),
                         "q3": float(np.percentile(dists, 75))},
            "recovery_rate": float(np.mean([m.recovered for m in members])),
            "seconds_mean": float(secs.mean()),
        })
    return {"configs": configs, "failures": failures,
            "rows": len(rows)}


def write_outputs(rows, csv_path, summary_path):
    with open(csv_path, "w") as fh:
        fh.write(metrics_csv(rows))
    with open(summary_path, "w") as fh:
        json.dump(summarize(rows), fh, indent=2)
        fh.write("\n")
