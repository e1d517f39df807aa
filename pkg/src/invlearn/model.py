"""Data model for the forward/inverse problem.

Feasible region, constraint hierarchy, observation aggregation (count,
centroid, squared-deviation constant), and parameter normalization, plus
JSON interchange (schema "v1").
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import SpecificationError
from .simplex import INFEASIBLE, LpSpec, solve_lp

STRUCTURAL = "structural"
BOX = "box"

SQUARED = "squared-euclidean"
L1 = "l1"


@dataclass(frozen=True)
class PolyhedralRegion:
    """Feasible set {x : Ax >= b} with per-row labels (structural/box)."""

    A: np.ndarray
    b: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.atleast_1d(np.asarray(self.b, dtype=float))
        if A.shape[0] != b.shape[0]:
            raise SpecificationError("A and b row counts differ")
        if A.shape[0] < 1:
            raise SpecificationError("region needs at least one row")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise SpecificationError("region entries must be finite")
        if np.any(np.all(A == 0.0, axis=1)):
            raise SpecificationError("region contains an all-zero row")
        labels = self.labels or tuple(STRUCTURAL for _ in range(A.shape[0]))
        labels = tuple(labels)
        if len(labels) != A.shape[0]:
            raise SpecificationError("label count must match row count")
        for lab in labels:
            if lab not in (STRUCTURAL, BOX):
                raise SpecificationError(f"unknown row label {lab!r}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def is_feasible_point(self, x, tol: float = 1e-7) -> bool:
        return bool(np.all(self.A @ np.asarray(x, dtype=float) - self.b >= -tol))

    def feasible_point(self, tol: float = 1e-7):
        """A feasible point via Phase-I, or None when the region is empty."""
        out = solve_lp(LpSpec(c=np.zeros(self.n), ineq_A=self.A,
                              ineq_b=self.b), tol=tol)
        return None if out.status == INFEASIBLE else out.x


@dataclass(frozen=True)
class ConstraintHierarchy:
    """Relevant rows R, preferred P subset of R, trivial T = complement."""

    relevant: frozenset
    preferred: frozenset = frozenset()
    m: int = 0

    def __post_init__(self):
        rel = frozenset(int(i) for i in self.relevant)
        pref = frozenset(int(i) for i in self.preferred)
        object.__setattr__(self, "relevant", rel)
        object.__setattr__(self, "preferred", pref)
        if self.m and any(i < 0 or i >= self.m for i in rel | pref):
            raise SpecificationError("hierarchy index out of range")

    @property
    def trivial(self) -> frozenset:
        return frozenset(range(self.m)) - self.relevant

    def findings(self) -> list:
        out = []
        if not self.preferred <= self.relevant:
            out.append("preferred not subset of relevant")
        return out


@dataclass(frozen=True)
class NormalizationSet:
    """Simplex normalization {theta >= 0, 1'theta = 1}, optional anchor."""

    kind: str = "simplex"
    anchor_index: Optional[int] = None
    anchor_floor: float = 0.0

    def __post_init__(self):
        if self.kind != "simplex":
            raise SpecificationError("only simplex normalization is supported")
        if self.anchor_index is not None and not 0.0 <= self.anchor_floor < 1.0:
            raise SpecificationError("anchor floor must lie in [0, 1)")

    def contains(self, theta, tol: float = 1e-7) -> bool:
        t = np.asarray(theta, dtype=float)
        ok = bool(np.all(t >= -tol) and abs(float(np.sum(t)) - 1.0) <= tol)
        if ok and self.anchor_index is not None:
            ok = t[self.anchor_index] >= self.anchor_floor - tol
        return ok


@dataclass(frozen=True)
class ObservationSummary:
    """Dataset compressed to (K, centroid, c2), optionally keeping points.

    c2 = sum_k ||x^k - centroid||^2, so the squared total loss at any z is
    K*||z - centroid||^2 + c2.
    """

    count: int
    centroid: np.ndarray
    c2: float
    points: Optional[np.ndarray] = None
    median: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.count < 0:
            raise SpecificationError("observation count must be >= 0")
        centroid = np.atleast_1d(np.asarray(self.centroid, dtype=float))
        object.__setattr__(self, "centroid", centroid)
        if self.c2 < -1e-12:
            raise SpecificationError("c2 must be nonnegative")
        if self.points is not None:
            pts = np.atleast_2d(np.asarray(self.points, dtype=float))
            object.__setattr__(self, "points", pts)
            if pts.shape[0] != self.count:
                raise SpecificationError("retained point count mismatch")
            if pts.size and float(np.max(np.abs(pts.mean(axis=0) - centroid))) > 1e-9:
                raise SpecificationError("retained points disagree with centroid")
        if self.median is not None:
            object.__setattr__(
                self, "median",
                np.atleast_1d(np.asarray(self.median, dtype=float)))

    @property
    def n(self) -> int:
        return self.centroid.shape[0]

    @staticmethod
    def empty(n: int, retain: bool = False) -> "ObservationSummary":
        return ObservationSummary(
            count=0, centroid=np.zeros(n), c2=0.0,
            points=np.zeros((0, n)) if retain else None)

    @staticmethod
    def from_points(points, retain: bool = True) -> "ObservationSummary":
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        centroid = pts.mean(axis=0)
        c2 = float(np.sum((pts - centroid) ** 2))
        return ObservationSummary(
            count=pts.shape[0], centroid=centroid, c2=c2,
            points=pts if retain else None,
            median=np.median(pts, axis=0) if retain else None)


def push_observation(s: ObservationSummary, x) -> ObservationSummary:
    """Streaming update: new summary with x appended.

    Uses the rank-one identity c2' = c2 + K/(K+1)*||x - centroid||^2.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if s.count == 0:
        return ObservationSummary(
            count=1, centroid=x.copy(), c2=0.0,
            points=x.reshape(1, -1) if s.points is not None else None,
            median=x.copy() if s.points is not None else None)
    if x.shape[0] != s.n:
        raise SpecificationError("observation dimension mismatch")
    K = s.count
    delta = x - s.centroid
    centroid = s.centroid + delta / (K + 1)
    c2 = s.c2 + K / (K + 1) * float(delta @ delta)
    points = None
    median = None
    if s.points is not None:
        points = np.vstack([s.points, x.reshape(1, -1)])
        median = np.median(points, axis=0)
    return ObservationSummary(count=K + 1, centroid=centroid, c2=c2,
                              points=points, median=median)


def total_loss(s: ObservationSummary, z, kind: str = SQUARED) -> float:
    """Aggregate loss of the dataset at z.

    Squared case works off the three-number summary alone; l1 needs the
    retained raw points.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if kind == SQUARED:
        d = z - s.centroid
        return s.count * float(d @ d) + s.c2
    if kind == L1:
        if s.points is None:
            raise SpecificationError("l1 loss requires retained raw points")
        return float(np.sum(np.abs(s.points - z)))
    raise SpecificationError(f"unknown loss kind {kind!r}")


@dataclass(frozen=True)
class InverseProblem:
    region: PolyhedralRegion
    hierarchy: ConstraintHierarchy
    observations: ObservationSummary
    loss: str = SQUARED
    normalization: NormalizationSet = field(default_factory=NormalizationSet)

    def __post_init__(self):
        if self.loss not in (SQUARED, L1):
            raise SpecificationError(f"unknown loss kind {self.loss!r}")


def validate(p: InverseProblem) -> list:
    """Structural findings; empty list means the problem is usable."""
    findings = []
    if p.observations.n != p.region.n:
        findings.append("observation dimension mismatch")
    if p.observations.count == 0:
        findings.append("empty observation set")
    findings.extend(p.hierarchy.findings())
    if p.hierarchy.m and p.hierarchy.m != p.region.m:
        findings.append("hierarchy row count mismatch")
    if p.loss == L1 and p.observations.points is None and p.observations.median is None:
        findings.append("l1 loss requires raw points or median")
    if p.region.feasible_point() is None:
        findings.append("region infeasible")
    return findings


# --- JSON interchange (schema v1) ---------------------------------------

def problem_to_dict(p: InverseProblem) -> dict:
    obs: dict = {"count": p.observations.count}
    if p.observations.points is not None:
        obs["points"] = p.observations.points.tolist()
    else:
        obs["centroid"] = p.observations.centroid.tolist()
        obs["c2"] = p.observations.c2
    doc = {
        "schema": "v1",
        "region": {"A": p.region.A.tolist(), "b": p.region.b.tolist(),
                   "labels": list(p.region.labels)},
        "hierarchy": {"relevant": sorted(p.hierarchy.relevant),
                      "preferred": sorted(p.hierarchy.preferred)},
        "observations": obs,
        "loss": p.loss,
        "normalization": {"kind": p.normalization.kind},
    }
    if p.normalization.anchor_index is not None:
        doc["normalization"]["anchor_index"] = p.normalization.anchor_index
        doc["normalization"]["anchor_floor"] = p.normalization.anchor_floor
    return doc


def problem_from_dict(doc: dict) -> InverseProblem:
    if doc.get("schema") != "v1":
        raise SpecificationError("unsupported schema version")
    reg = doc["region"]
    region = PolyhedralRegion(A=np.array(reg["A"], dtype=float),
                              b=np.array(reg["b"], dtype=float),
                              labels=tuple(reg.get("labels", ())))
    hier = doc.get("hierarchy", {})
    hierarchy = ConstraintHierarchy(
        relevant=frozenset(hier.get("relevant", [])),
        preferred=frozenset(hier.get("preferred", [])),
        m=region.m)
    obs = doc["observations"]
    if "points" in obs:
        observations = ObservationSummary.from_points(obs["points"])
    else:
        observations = ObservationSummary(
            count=int(obs["count"]),
            centroid=np.array(obs["centroid"], dtype=float),
            c2=float(obs["c2"]))
    norm = doc.get("normalization", {})
    normalization = NormalizationSet(
        kind=norm.get("kind", "simplex"),
        anchor_index=norm.get("anchor_index"),
        anchor_floor=float(norm.get("anchor_floor", 0.0)))
    return InverseProblem(region=region, hierarchy=hierarchy,
                          observations=observations,
                          loss=doc.get("loss", SQUARED),
                          normalization=normalization)


def problem_to_json(p: InverseProblem, **kwargs) -> str:
    return json.dumps(problem_to_dict(p), **kwargs)


def problem_from_json(text: str) -> InverseProblem:
    return problem_from_dict(json.loads(text))
