"""Command-line interface.

Solver subcommands read a v1 problem JSON document and write a solution
JSON; `bench` runs seeded instance grids to metrics.csv + summary.json;
`report` renders figures from a metrics file; `diet plan` runs the
sequential navigator on an intake CSV; `serve` starts the HTTP API.
"""

from __future__ import annotations

import itertools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from .errors import InvlearnError
from .experiments import InstanceSpec, run_batch, write_outputs
from .geometry import identifiability_report
from .model import problem_from_json
from .serialize import (
    baseline_to_dict,
    solution_to_dict,
    step_to_dict,
    trace_to_dict,
)
from .solvers import (
    GilConfig,
    run_mgil,
    solve_gil,
    solve_il,
    solve_ilo_baseline,
)


def _load_problem(path):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return problem_from_json(text)


def _emit(doc, output):
    text = json.dumps(doc, indent=2) + "\n"
    if output in (None, "-"):
        click.echo(text, nl=False)
    else:
        Path(output).write_text(text)


def _export_forward_lp(problem, theta, path, name):
    from .lp_export import export_lp
    from .simplex import LpSpec
    spec = LpSpec(c=np.asarray(theta, dtype=float),
                  ineq_A=problem.region.A, ineq_b=problem.region.b)
    Path(path).write_text(export_lp(spec, name=name))


@click.group()
def main():
    """Inverse-learning toolkit: recover latent decisions and parameters
    from observed behavior over a polyhedral feasible region."""


_problem_arg = click.argument("problem", type=str)
_output_opt = click.option("--output", "-o", default=None,
                           help="Solution JSON path (default: stdout).")
_mode_opt = click.option("--mode", default="best-first",
                         type=click.Choice(["best-first", "exhaustive"]))
_export_opt = click.option("--export-lp", "export_lp_path", default=None,
                           help="Also write the recovered forward LP in "
                                "CPLEX-style text format.")


@main.command()
@_problem_arg
@_output_opt
@_mode_opt
@_export_opt
def il(problem, output, mode, export_lp_path):
    """Recover the single representative solution closest to the data."""
    prob = _load_problem(problem)
    sol = solve_il(prob, mode=mode)
    _emit(solution_to_dict(sol), output)
    if export_lp_path:
        _export_forward_lp(prob, sol.theta, export_lp_path, "il-forward")


@main.command()
@_problem_arg
@click.option("--r", "r", type=int, required=True,
              help="Exact number of relevant rows to activate.")
@click.option("--omega", type=float, default=1.0,
              help="Loss-vs-preferred tradeoff weight in [0, 1].")
@click.option("--epsilon", type=float, default=None,
              help="Strict slack enforced on inactive relevant rows.")
@_output_opt
@_mode_opt
@_export_opt
def gil(problem, r, omega, epsilon, output, mode, export_lp_path):
    """Goal-integrated recovery with exactly r relevant rows binding."""
    prob = _load_problem(problem)
    sol = solve_gil(prob, GilConfig(r=r, omega=omega, epsilon=epsilon,
                                    mode=mode))
    _emit(solution_to_dict(sol), output)
    if export_lp_path:
        _export_forward_lp(prob, sol.theta, export_lp_path, "gil-forward")


@main.command()
@_problem_arg
@click.option("--lmax", type=int, default=10, help="Maximum step count.")
@click.option("--tau", type=float, default=None,
              help="Marginal-cost threshold; steps costing more are "
                   "reported but not accepted.")
@click.option("--omega", type=float, default=1.0)
@_output_opt
@_mode_opt
def mgil(problem, lmax, tau, omega, output, mode):
    """Sequential navigation: activate one more relevant row per step."""
    prob = _load_problem(problem)
    trace = run_mgil(prob, L_max=lmax, omega=omega,
                     tau=np.inf if tau is None else tau, mode=mode)
    _emit(trace_to_dict(trace), output)


@main.command()
@_problem_arg
@click.option("--vertex-samples", type=int, default=10,
              help="Random-objective vertices sampled as theta candidates.")
@click.option("--seed", type=int, default=0)
@_output_opt
@_export_opt
def baseline(problem, vertex_samples, seed, output, export_lp_path):
    """Recover-then-project baseline via LP decomposition."""
    prob = _load_problem(problem)
    res = solve_ilo_baseline(prob, vertex_samples=vertex_samples, seed=seed)
    _emit(baseline_to_dict(res), output)
    if export_lp_path:
        _export_forward_lp(prob, res.theta, export_lp_path,
                           "baseline-forward")


@main.command()
@_problem_arg
@_output_opt
def diagnose(problem, output):
    """Identifiability diagnostics for the problem's observations."""
    prob = _load_problem(problem)
    if prob.observations.points is None:
        raise click.ClickException("diagnosis requires retained raw points")
    rep = identifiability_report(prob.observations.points, prob.region,
                                 prob.normalization)
    _emit(rep.to_dict(), output)


def _load_config(path):
    text = Path(path).read_text()
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:  # Python < 3.11
            import tomli as tomllib
        return tomllib.loads(text)
    return json.loads(text)


def _specs_from_config(cfg) -> list:
    seeds = cfg.get("seeds")
    if seeds is None:
        start = int(cfg.get("seed_start", 0))
        seeds = list(range(start, start + int(cfg.get("seed_count", 10))))
    grid = {
        "scenario": cfg.get("scenarios", ["il-assumption"]),
        "binding_level": cfg.get("binding_levels", [1]),
        "noise_fraction": cfg.get("noise_fractions", [0.0]),
        "knowledge": cfg.get("knowledge_levels", [0]),
    }
    specs = []
    for seed in seeds:
        for combo in itertools.product(*grid.values()):
            kwargs = dict(zip(grid.keys(), combo))
            specs.append(InstanceSpec(
                seed=int(seed), n=int(cfg.get("n", 10)),
                relevant_rows=int(cfg.get("relevant_rows", 10)),
                k_range=tuple(cfg.get("k_range", (2, 8))), **kwargs))
    return specs


@main.command()
@click.option("--config", "config_path", required=True,
              help="JSON or TOML grid of instance parameters and models.")
@click.option("--out-dir", default=".", help="Directory for metrics.csv "
                                             "and summary.json.")
def bench(config_path, out_dir):
    """Run a seeded benchmark grid and write metrics + summary."""
    cfg = _load_config(config_path)
    specs = _specs_from_config(cfg)
    models = cfg.get("models", ["il"])
    rows = run_batch(specs, models,
                     vertex_samples=int(cfg.get("vertex_samples", 10)))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_outputs(rows, out / "metrics.csv", out / "summary.json")
    click.echo(f"wrote {out / 'metrics.csv'} ({len(rows)} rows) and "
               f"{out / 'summary.json'}")


@main.command()
@click.option("--metrics", "metrics_path", required=True,
              help="metrics.csv produced by bench.")
@click.option("--out-dir", default=None,
              help="Figure directory (default: alongside the metrics file).")
def report(metrics_path, out_dir):
    """Render figures from a benchmark metrics file."""
    from .report import render_metrics_report
    target = out_dir if out_dir is not None else Path(metrics_path).parent
    written = render_metrics_report(metrics_path, target)
    for path in written:
        click.echo(f"wrote {path}")


@main.group()
def diet():
    """Diet-domain commands."""


@diet.command()
@click.option("--intake", "intake_path", required=True,
              help="Intake CSV (header = food-group names).")
@click.option("--regimen", "regimen_name", default="dash-women-51")
@click.option("--steps", "steps", type=int, default=3)
@click.option("--tau", type=float, default=None)
@click.option("--perturb", type=int, default=0,
              help="Gaussian perturbations added per observation.")
@click.option("--sigma", type=float, default=0.5,
              help="Perturbation standard deviation (servings).")
@click.option("--figure", "figure_path", default=None,
              help="Also render per-step nutrient trajectories to this "
                   "image path.")
@_output_opt
def plan(intake_path, regimen_name, steps, tau, perturb, sigma, figure_path,
         output):
    """Run the sequential navigator on an intake record."""
    from .diet import (
        assemble_diet_problem,
        build_diet_region,
        ingest_intake_csv,
        load_food_groups,
        load_nutrient_matrix,
        load_regimen,
        perturb_observations,
    )
    groups = load_food_groups()
    model = build_diet_region(groups, load_nutrient_matrix(groups),
                              load_regimen(regimen_name))
    with open(intake_path) as fh:
        obs = ingest_intake_csv(fh, groups)
    if perturb > 0:
        obs = perturb_observations(obs, count=perturb, sigma=sigma)
    prob = assemble_diet_problem(model, obs)
    trace = run_mgil(prob, L_max=steps,
                     tau=np.inf if tau is None else tau)
    doc = trace_to_dict(trace, row_names=model.row_names)
    for step in doc["steps"]:
        step["nutrients"] = model.nutrients.profile(step["point"])
    _emit(doc, output)
    if figure_path:
        from .report import render_trace_nutrients
        render_trace_nutrients(doc, model, figure_path)
        click.echo(f"wrote {figure_path}", err=True)


@main.command()
@click.option("--host", default=None,
              help="Bind address (env INVLEARN_HOST, default 127.0.0.1).")
@click.option("--port", type=int, default=None,
              help="Bind port (env INVLEARN_PORT, default 8000).")
def serve(host, port):
    """Start the HTTP session API."""
    import uvicorn

    from .service import create_app
    host = host or os.environ.get("INVLEARN_HOST", "127.0.0.1")
    port = port if port is not None else int(
        os.environ.get("INVLEARN_PORT", "8000"))
    uvicorn.run(create_app(), host=host, port=port)


def _excepthook(exc_type, exc, tb):
    if issubclass(exc_type, InvlearnError):
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.__excepthook__(exc_type, exc, tb)


sys.excepthook = _excepthook


if __name__ == "__main__":
    main()
