"""Write an LpSpec as CPLEX-style LP format text for external cross-checks."""

from __future__ import annotations

import numpy as np

from .simplex import LpSpec


def _term(coef: float, name: str, first: bool) -> str:
    if first:
        return f"{coef:.12g} {name}"
    sign = "+" if coef >= 0 else "-"
    return f" {sign} {abs(coef):.12g} {name}"


def _expr(coefs) -> str:
    parts = []
    first = True
    for j, c in enumerate(coefs):
        if c == 0:
            continue
        parts.append(_term(float(c), f"x{j + 1}", first))
        first = False
    return "".join(parts) if parts else "0 x1"


def export_lp(spec: LpSpec, name: str = "problem") -> str:
    """Render the LP in the standard text format (minimize, Gx >= h rows)."""
    lines = [f"\\ {name}", "Minimize", f" obj: {_expr(spec.c)}",
             "Subject To"]
    for i in range(spec.eq_A.shape[0]):
        lines.append(f" e{i + 1}: {_expr(spec.eq_A[i])} = {spec.eq_b[i]:.12g}")
    for i in range(spec.ineq_A.shape[0]):
        lines.append(
            f" c{i + 1}: {_expr(spec.ineq_A[i])} >= {spec.ineq_b[i]:.12g}")
    lines.append("Bounds")
    n = spec.n
    lower = spec.lower if spec.lower is not None else np.full(n, -np.inf)
    upper = spec.upper if spec.upper is not None else np.full(n, np.inf)
    for j in range(n):
        lo, up = lower[j], upper[j]
        if np.isneginf(lo) and np.isposinf(up):
            lines.append(f" x{j + 1} free")
        elif np.isposinf(up):
            lines.append(f" x{j + 1} >= {lo:.12g}")
        elif np.isneginf(lo):
            lines.append(f" x{j + 1} <= {up:.12g}")
        else:
            lines.append(f" {lo:.12g} <= x{j + 1} <= {up:.12g}")
    lines.append("End")
    return "\n".join(lines) + "\n"
