"""Figure rendering for benchmark metrics and tradeoff traces.

Consumes the delimited metrics output of the benchmark runner and renders
matplotlib figures to files alongside it; also renders per-step nutrient
trajectories for diet traces.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

import numpy as np  # noqa: E402

from .errors import SpecificationError


def read_metrics_csv(path) -> list:
    with open(path) as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise SpecificationError(f"no metric rows in {path}")
    for row in rows:
        for key in ("distance", "seconds"):
            row[key] = float(row[key]) if row[key] not in ("", None) else None
        row["noise"] = float(row["noise"])
        row["recovered"] = {"True": True, "False": False, "1": True,
                            "0": False}.get(row["recovered"])
    return rows


def _by(rows, key):
    out: dict = {}
    for row in rows:
        out.setdefault(row[key], []).append(row)
    return out


def render_distance_figure(rows, path):
    """Mean solution distance per model across noise levels."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for model, members in sorted(_by(rows, "model").items()):
        noise_groups = _by([r for r in members if r["distance"] is not None],
                           "noise")
        levels = sorted(noise_groups)
        means = [np.mean([r["distance"] for r in noise_groups[nl]])
                 for nl in levels]
        ax.plot(levels, means, marker="o", label=model)
    ax.set_xlabel("noise fraction")
    ax.set_ylabel("mean distance to latent point")
    ax.set_title("Solution distance by noise level")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_timing_figure(rows, path):
    """Mean solve wall-clock per model."""
    fig, ax = plt.subplots(figsize=(6, 4))
    models, means = [], []
    for model, members in sorted(_by(rows, "model").items()):
        secs = [r["seconds"] for r in members if r["seconds"] is not None]
        if secs:
            models.append(model)
            means.append(np.mean(secs))
    ax.bar(models, means)
    ax.set_ylabel("mean solve seconds")
    ax.set_title("Solve time by model")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_recovery_figure(rows, path):
    """Recovery rate per model as a function of the cardinality r."""
    fig, ax = plt.subplots(figsize=(6, 4))
    plotted = False
    for model, members in sorted(_by(rows, "model").items()):
        with_r = [r for r in members
                  if r["r"] not in ("", None) and r["recovered"] is not None]
        if not with_r:
            continue
        r_groups = _by(with_r, "r")
        levels = sorted(r_groups, key=lambda v: int(v))
        rates = [np.mean([float(row["recovered"]) for row in r_groups[lv]])
                 for lv in levels]
        ax.plot([int(v) for v in levels], rates, marker="s", label=model)
        plotted = True
    if not plotted:
        rates_by_model = sorted(_by(rows, "model").items())
        ax.bar([m for m, _ in rates_by_model],
               [np.mean([float(bool(r["recovered"])) for r in mem
                         if r["recovered"] is not None] or [0.0])
                for _, mem in rates_by_model])
    ax.set_xlabel("active relevant rows r")
    ax.set_ylabel("recovery rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title("Parameter recovery")
    if plotted:
        ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_metrics_report(csv_path, out_dir) -> list:
    """Render the figure set for a metrics file; returns written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_metrics_csv(csv_path)
    written = []
    for name, renderer in (("distance_by_noise.png", render_distance_figure),
                           ("time_by_model.png", render_timing_figure),
                           ("recovery_by_r.png", render_recovery_figure)):
        path = out_dir / name
        renderer(rows, path)
        written.append(str(path))
    return written


def render_trace_nutrients(trace_doc: dict, model, path,
                           nutrients: tuple = ()):
    """Per-step nutrient levels with shaded regimen-bound bands.

    ``trace_doc`` is the serialized trace (steps with points); ``model`` is
    a DietModel supplying nutrient contents and bounds.
    """
    steps = trace_doc["steps"]
    if not steps:
        raise SpecificationError("trace has no steps to plot")
    chosen = tuple(nutrients) or tuple(model.regimen.bounds)
    cols = 2
    rows_n = (len(chosen) + cols - 1) // cols
    fig, axes = plt.subplots(rows_n, cols, figsize=(9, 2.4 * rows_n),
                             squeeze=False)
    xs = [s["index"] for s in steps]
    for k, nut in enumerate(chosen):
        ax = axes[k // cols][k % cols]
        content = model.nutrients.row(nut)
        ys = [float(content @ np.asarray(s["point"])) for s in steps]
        spec = model.regimen.bounds[nut]
        lo, up = spec.get("lower"), spec.get("upper")
        if lo is not None and up is not None:
            ax.axhspan(lo, up, color="tab:green", alpha=0.2)
        ax.plot(xs, ys, marker="o", color="tab:blue")
        ax.set_title(nut, fontsize=9)
        ax.set_xticks(xs)
    for k in range(len(chosen), rows_n * cols):
        axes[k // cols][k % cols].axis("off")
    fig.suptitle("Nutrient profile per accepted step")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return str(path)


def write_summary_json(rows_or_summary, path):
    with open(path, "w") as fh:
        json.dump(rows_or_summary, fh, indent=2)
        fh.write("\n")
