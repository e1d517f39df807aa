"""JSON-friendly dictionaries for solver results (CLI and HTTP share these)."""

from __future__ import annotations

from typing import Optional

import numpy as np

from .solvers import BaselineResult, IlSolution, StepRecord, TradeoffTrace


def _vec(v) -> Optional[list]:
    return None if v is None else np.asarray(v, dtype=float).tolist()


def polytope_bounds(polytope) -> Optional[dict]:
    if polytope is None or polytope.empty:
        return None
    return {
        "active": list(polytope.active),
        "lower": _vec(polytope.lower_bounds),
        "upper": _vec(polytope.upper_bounds),
        "witness": _vec(polytope.witness),
    }


def solution_to_dict(sol: IlSolution, row_names=None) -> dict:
    doc = {
        "point": _vec(sol.point),
        "loss": float(sol.loss),
        "active": list(sol.active),
        "theta": _vec(sol.theta),
        "theta_bounds": polytope_bounds(sol.polytope),
        "stats": {
            "patterns_examined": sol.stats.patterns_examined,
            "patterns_pruned": sol.stats.patterns_pruned,
            "projections": sol.stats.projections,
            "cone_checks": sol.stats.cone_checks,
        },
    }
    if sol.r is not None:
        doc["r"] = sol.r
    if sol.score is not None:
        doc["score"] = float(sol.score)
    if sol.chosen_relevant is not None:
        doc["chosen_relevant"] = list(sol.chosen_relevant)
    if row_names is not None:
        doc["active_names"] = [row_names[i] for i in sol.active]
    return doc


def step_to_dict(step: StepRecord, row_names=None) -> dict:
    doc = {
        "index": step.index,
        "point": _vec(step.point),
        "loss": float(step.loss),
        "delta_loss": float(step.delta_loss),
        "active_relevant": list(step.active_relevant),
        "newly_activated": list(step.newly_activated),
        "theta": _vec(step.theta),
    }
    if step.score is not None:
        doc["score"] = float(step.score)
    if row_names is not None:
        doc["newly_activated_names"] = [row_names[i]
                                        for i in step.newly_activated]
        doc["active_relevant_names"] = [row_names[i]
                                        for i in step.active_relevant]
    return doc


def trace_to_dict(trace: TradeoffTrace, row_names=None) -> dict:
    return {
        "steps": [step_to_dict(s, row_names) for s in trace.steps],
        "termination": trace.termination,
        "rejected_step": (None if trace.rejected_step is None
                          else step_to_dict(trace.rejected_step, row_names)),
    }


def baseline_to_dict(res: BaselineResult) -> dict:
    return {
        "theta": _vec(res.theta),
        "forward_point": _vec(res.forward_point),
        "projections": np.asarray(res.projections).tolist(),
        "loss": float(res.loss),
        "candidates_tried": res.candidates_tried,
    }
