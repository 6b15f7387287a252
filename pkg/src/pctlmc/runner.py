"""Shared run logic behind both the HTTP service and the command line.

A check run builds the model, evaluates one formula at every grid cell, and
packages values, the satisfaction set, and per-until fixed-point diagnostics
into a :class:`CheckResult`.  When the formula's root is a probability
operator the value column is the probability of its path formula; otherwise
it is the 0/1 satisfaction indicator.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel

from .checker import (
    Model,
    NonConvergenceError,
    check,
    path_probabilities,
    simulate_until,
    threshold_set,
)
from .formula import Prob, desugar, parse, pretty
from .runconfig import ConfigError, RunConfig, build_model

__all__ = [
    "CheckResult",
    "GridOut",
    "SatisfactionOut",
    "SimulationResult",
    "UntilEvaluation",
    "run_check",
    "run_simulation",
]


class GridOut(BaseModel):
    lo: float
    hi: float
    cells: int


class UntilEvaluation(BaseModel):
    """Fixed-point diagnostics for one until operator inside the formula."""

    operator: str
    kind: Literal["bounded", "unbounded"]
    iterations: int
    final_residual: float
    alpha: float
    converged: bool


class SatisfactionOut(BaseModel):
    intervals: list[tuple[float, float]]
    lower_tail: bool
    upper_tail: bool
    cell_count: int


class CheckResult(BaseModel):
    formula: str
    desugared: str
    grid: GridOut
    cell_centers: list[float]
    values: list[float]
    satisfied: list[bool]
    satisfaction: SatisfactionOut | None
    evaluations: list[UntilEvaluation]
    converged: bool


class SimulationResult(BaseModel):
    x0: float
    estimate: float
    half_width: float
    n: int
    horizon: int
    seed: int
    phi: str
    psi: str


def run_check(cfg: RunConfig, formula_text: str,
              tol: float | None = None, max_iter: int | None = None) -> CheckResult:
    """Evaluate one formula over the configured model.

    Raises ConfigError / FormulaSyntaxError / UnboundAtomError for bad
    inputs.  A non-convergent unbounded until is not an exception here: the
    result carries converged=False and the recorded evaluations, with empty
    value and satisfaction columns.
    """
    root = desugar(parse(formula_text))
    model = build_model(cfg)
    tol = tol if tol is not None else cfg.solver.tol
    max_iter = max_iter if max_iter is not None else cfg.solver.max_iter

    trace: list[dict] = []
    converged = True
    sat = None
    values: list[float] = []
    try:
        if isinstance(root, Prob):
            vf = path_probabilities(model, root.path, tol=tol, max_iter=max_iter, trace=trace)
            sat = threshold_set(vf, root.rel, root.p)
            values = [float(v) for v in vf.values]
        else:
            sat = check(model, root, tol=tol, max_iter=max_iter, trace=trace)
            values = [float(v) for v in sat.mask]
    except NonConvergenceError:
        converged = False

    return CheckResult(
        formula=formula_text,
        desugared=pretty(root),
        grid=GridOut(lo=model.grid.lo, hi=model.grid.hi, cells=model.grid.cells),
        cell_centers=[float(c) for c in model.grid.centers],
        values=values,
        satisfied=[bool(b) for b in sat.mask] if sat is not None else [],
        satisfaction=SatisfactionOut(
            intervals=sat.intervals(model.grid),
            lower_tail=sat.lower_tail,
            upper_tail=sat.upper_tail,
            cell_count=sat.cell_count,
        ) if sat is not None else None,
        evaluations=[UntilEvaluation(**rec) for rec in trace],
        converged=converged,
    )


def run_simulation(cfg: RunConfig, x0: float, n: int, horizon: int, seed: int,
                   phi: str | None = None, psi: str | None = None) -> SimulationResult:
    """Monte Carlo until estimate from one start state, using named regions."""
    model = build_model(cfg)
    sim = cfg.simulation
    phi_name = phi or (sim.phi if sim else "safe")
    psi_name = psi or (sim.psi if sim else "target")
    for name in (phi_name, psi_name):
        if name not in model.regions:
            raise ConfigError(f"simulation region {name!r} is not defined in the config")
    estimate, half_width = simulate_until(
        model, x0, model.regions[phi_name], model.regions[psi_name], horizon, n, seed
    )
    return SimulationResult(
        x0=x0, estimate=estimate, half_width=half_width,
        n=n, horizon=horizon, seed=seed, phi=phi_name, psi=psi_name,
    )
