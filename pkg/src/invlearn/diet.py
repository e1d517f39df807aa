"""Diet application layer.

Food-group/nutrient data model, regimen-bound region construction, intake
CSV ingestion, and l1-loss inverse-problem assembly. Bundled fixtures: the
38-group table with serving sizes, a 22-nutrient per-serving matrix
(sample-food columns measured, remainder synthetic and labeled as such),
a DASH-style regimen preset, and a synthetic 50-row intake cohort.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional

import numpy as np

from .errors import SpecificationError
from .model import (
    BOX,
    L1,
    STRUCTURAL,
    ConstraintHierarchy,
    InverseProblem,
    ObservationSummary,
    PolyhedralRegion,
)

SERVING_CAP_DEFAULT = 8.0


@dataclass(frozen=True)
class FoodGroupTable:
    names: tuple
    serving_g: np.ndarray

    def __post_init__(self):
        if len(set(self.names)) != len(self.names):
            raise SpecificationError("food group names must be unique")
        object.__setattr__(self, "serving_g",
                           np.asarray(self.serving_g, dtype=float))
        if np.any(self.serving_g <= 0):
            raise SpecificationError("serving sizes must be positive")

    @property
    def count(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class NutrientMatrix:
    nutrients: tuple
    per_serving: np.ndarray  # (n_nutrients, n_groups)

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.per_serving, dtype=float))
        object.__setattr__(self, "per_serving", m)
        if m.shape[0] != len(self.nutrients):
            raise SpecificationError("nutrient name/row count mismatch")
        if np.any(m < 0):
            raise SpecificationError("nutrient contents must be nonnegative")

    def row(self, nutrient: str) -> np.ndarray:
        try:
            return self.per_serving[self.nutrients.index(nutrient)]
        except ValueError:
            raise SpecificationError(f"unknown nutrient {nutrient!r}")

    def profile(self, servings) -> dict:
        vals = self.per_serving @ np.asarray(servings, dtype=float)
        return dict(zip(self.nutrients, (float(v) for v in vals)))


@dataclass(frozen=True)
class RegimenBounds:
    name: str
    demographic: str
    bounds: dict  # nutrient -> {lower, upper, lower_relevant, upper_relevant}
    serving_cap: float = SERVING_CAP_DEFAULT

    def __post_init__(self):
        any_relevant = False
        for nut, spec in self.bounds.items():
            lo = spec.get("lower")
            up = spec.get("upper")
            if lo is not None and up is not None and lo > up:
                raise SpecificationError(
                    f"lower bound exceeds upper bound for {nut}")
            any_relevant |= bool(spec.get("lower_relevant")
                                 or spec.get("upper_relevant"))
        if not any_relevant:
            raise SpecificationError("regimen needs at least one relevant bound")


@dataclass
class DietModel:
    region: PolyhedralRegion
    hierarchy: ConstraintHierarchy
    row_names: tuple
    groups: FoodGroupTable
    nutrients: NutrientMatrix
    regimen: RegimenBounds


# --- bundled fixtures ----------------------------------------------------

def _data_text(name: str) -> str:
    return resources.files("invlearn").joinpath("data", name).read_text()


def load_food_groups() -> FoodGroupTable:
    rows = list(csv.reader(_data_text("food_groups.csv").splitlines()))
    names = tuple(r[0] for r in rows[1:])
    sizes = np.array([float(r[1]) for r in rows[1:]])
    return FoodGroupTable(names=names, serving_g=sizes)


def load_nutrient_matrix(groups: Optional[FoodGroupTable] = None) -> NutrientMatrix:
    rows = list(csv.reader(_data_text("nutrients.csv").splitlines()))
    header = tuple(rows[0][1:])
    if groups is not None and header != groups.names:
        raise SpecificationError("nutrient matrix columns disagree with groups")
    nutrients = tuple(r[0] for r in rows[1:])
    m = np.array([[float(v) for v in r[1:]] for r in rows[1:]])
    return NutrientMatrix(nutrients=nutrients, per_serving=m)


def load_regimen(name: str = "dash-women-51") -> RegimenBounds:
    doc = json.loads(_data_text(f"regimens/{name}.json"))
    return RegimenBounds(name=doc["name"], demographic=doc["demographic"],
                         bounds=doc["bounds"],
                         serving_cap=float(doc.get("serving_cap",
                                                   SERVING_CAP_DEFAULT)))


def load_sample_cohort() -> ObservationSummary:
    return ingest_intake_csv(_data_text("sample_cohort.csv").splitlines(),
                             load_food_groups())


# --- region construction -------------------------------------------------

def _attainable_range(content, cap):
    lo = 0.0
    hi = float(np.sum(content) * cap)
    return lo, hi


def build_diet_region(groups: FoodGroupTable, nutrients: NutrientMatrix,
                      regimen: RegimenBounds,
                      serving_cap: Optional[float] = None) -> DietModel:
    """Assemble the feasible region and hierarchy from regimen bounds.

    One row per finite nutrient bound (lower: N'z >= L; upper:
    -N'z >= -U), then nonnegativity and serving-cap box rows per group.
    Bound rows flagged relevant in the regimen form the relevant set.
    """
    cap = float(serving_cap if serving_cap is not None
                else regimen.serving_cap)
    n = groups.count
    if nutrients.per_serving.shape[1] != n:
        raise SpecificationError("nutrient matrix width mismatch")
    rows, rhs, names, labels, relevant = [], [], [], [], []
    for nut, spec in regimen.bounds.items():
        content = nutrients.row(nut)
        lo, up = spec.get("lower"), spec.get("upper")
        if lo is not None:
            rows.append(content)
            rhs.append(float(lo))
            names.append(f"{nut}:lower")
            labels.append(STRUCTURAL)
            if spec.get("lower_relevant"):
                relevant.append(len(rows) - 1)
        if up is not None:
            rows.append(-content)
            rhs.append(-float(up))
            names.append(f"{nut}:upper")
            labels.append(STRUCTURAL)
            if spec.get("upper_relevant"):
                relevant.append(len(rows) - 1)
    for j, g in enumerate(groups.names):
        e = np.zeros(n)
        e[j] = 1.0
        rows.append(e)
        rhs.append(0.0)
        names.append(f"box:{g}:lower")
        labels.append(BOX)
    for j, g in enumerate(groups.names):
        e = np.zeros(n)
        e[j] = -1.0
        rows.append(e)
        rhs.append(-cap)
        names.append(f"box:{g}:upper")
        labels.append(BOX)

    region = PolyhedralRegion(A=np.array(rows), b=np.array(rhs),
                              labels=tuple(labels))
    if region.feasible_point() is None:
        offender = _tightest_bound_pair(regimen, nutrients, cap)
        raise SpecificationError(
            f"diet region is empty; tightest bound pair: {offender}")
    hierarchy = ConstraintHierarchy(relevant=frozenset(relevant), m=region.m)
    return DietModel(region=region, hierarchy=hierarchy,
                     row_names=tuple(names), groups=groups,
                     nutrients=nutrients, regimen=regimen)


def _tightest_bound_pair(regimen, nutrients, cap) -> str:
    worst, worst_margin = "unknown", np.inf
    for nut, spec in regimen.bounds.items():
        content = nutrients.row(nut)
        lo_att, hi_att = _attainable_range(content, cap)
        lo, up = spec.get("lower"), spec.get("upper")
        if lo is not None:
            margin = hi_att - float(lo)
            if margin < worst_margin:
                worst, worst_margin = f"{nut}:lower={lo}", margin
        if up is not None:
            margin = float(up) - lo_att
            if margin < worst_margin:
                worst, worst_margin = f"{nut}:upper={up}", margin
    return worst


def extract_bounds(model: DietModel) -> dict:
    """Inverse of build_diet_region over the bound rows (round-trip check)."""
    out: dict = {}
    for name, b in zip(model.row_names, model.region.b):
        if name.startswith("box:"):
            continue
        nut, kind = name.rsplit(":", 1)
        entry = out.setdefault(nut, {})
        entry[kind] = float(b) if kind == "lower" else float(-b)
    return out


# --- ingestion & assembly ------------------------------------------------

def ingest_intake_csv(stream, groups: FoodGroupTable) -> ObservationSummary:
    """Parse an intake CSV (header = group names, one observation per line).

    Retains raw points and the componentwise median. Errors carry line
    numbers.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    reader = csv.reader(stream)
    try:
        header = tuple(next(reader))
    except StopIteration:
        raise SpecificationError("intake CSV is empty")
    if header != groups.names:
        unknown = [c for c in header if c not in groups.names]
        if unknown:
            raise SpecificationError(
                f"unknown group column(s): {', '.join(unknown)}")
        raise SpecificationError("intake columns must match the group order")
    points = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != groups.count:
            raise SpecificationError(
                f"line {lineno}: expected {groups.count} cells, got {len(row)}")
        try:
            vals = [float(v) for v in row]
        except ValueError as exc:
            raise SpecificationError(f"line {lineno}: non-numeric cell ({exc})")
        if any(v < 0 for v in vals):
            raise SpecificationError(f"line {lineno}: negative servings")
        points.append(vals)
    if not points:
        raise SpecificationError("intake CSV has no observation rows")
    return ObservationSummary.from_points(np.array(points), retain=True)


def perturb_observations(summary: ObservationSummary, count: int,
                         sigma: float, seed: int = 0) -> ObservationSummary:
    """Augment each retained observation with Gaussian perturbations,
    clipped at zero servings."""
    if summary.points is None:
        raise SpecificationError("perturbation requires retained points")
    rng = np.random.default_rng(seed)
    reps = np.repeat(summary.points, count, axis=0)
    noisy = np.maximum(reps + rng.normal(size=reps.shape) * sigma, 0.0)
    return ObservationSummary.from_points(
        np.vstack([summary.points, noisy]), retain=True)


def assemble_diet_problem(model: DietModel,
                          observations: ObservationSummary) -> InverseProblem:
    if observations.n != model.region.n:
        raise SpecificationError("observation width disagrees with region")
    return InverseProblem(region=model.region, hierarchy=model.hierarchy,
                          observations=observations, loss=L1)


def sodium_level(model: DietModel, z) -> float:
    return float(model.nutrients.row("sodium_mg") @ np.asarray(z, dtype=float))


def sodium_violation_fraction(model: DietModel,
                              observations: ObservationSummary) -> float:
    """Fraction of retained observations above the sodium upper bound."""
    if observations.points is None:
        raise SpecificationError("requires retained points")
    cap = model.regimen.bounds["sodium_mg"]["upper"]
    sod = observations.points @ model.nutrients.row("sodium_mg")
    return float(np.mean(sod > cap))
