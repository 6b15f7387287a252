"""HTTP facade over the checker.

POST a model configuration plus a formula to ``/check`` and get per-cell
values, the satisfaction set, and fixed-point diagnostics back; ``/simulate``
runs the Monte Carlo cross-check.  Input problems surface as 400 responses
with a machine-readable ``error`` kind; a non-convergent unbounded until is
a regular 200 response with ``converged: false``.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .checker import UnboundAtomError
from .formula import FormulaSyntaxError
from .runconfig import ConfigError, RunConfig
from .runner import CheckResult, SimulationResult, run_check, run_simulation

__all__ = ["app", "CheckRequest", "SimulateRequest"]

app = FastAPI(
    title="pctlmc",
    version=__version__,
    description="PCTL model checking for finite and continuous one-dimensional Markov chains",
)


class CheckRequest(BaseModel):
    config: RunConfig
    formula: str
    tol: float | None = Field(default=None, gt=0)
    max_iter: int | None = Field(default=None, ge=1)


class SimulateRequest(BaseModel):
    config: RunConfig
    x0: float
    n: int = Field(default=10000, ge=1)
    horizon: int = Field(default=10, ge=0)
    seed: int = 0
    phi: str | None = None
    psi: str | None = None


def _bad_request(kind: str, exc: Exception) -> HTTPException:
    detail = {"error": kind, "message": str(exc)}
    if isinstance(exc, FormulaSyntaxError):
        detail["offset"] = exc.offset
        detail["expected"] = sorted(exc.expected)
    return HTTPException(status_code=400, detail=detail)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/check", response_model=CheckResult)
def check_endpoint(request: CheckRequest) -> CheckResult:
    try:
        return run_check(request.config, request.formula,
                         tol=request.tol, max_iter=request.max_iter)
    except FormulaSyntaxError as e:
        raise _bad_request("formula-syntax", e) from e
    except UnboundAtomError as e:
        raise _bad_request("unbound-atom", e) from e
    except ConfigError as e:
        raise _bad_request("config", e) from e


@app.post("/simulate", response_model=SimulationResult)
def simulate_endpoint(request: SimulateRequest) -> SimulationResult:
    try:
        return run_simulation(request.config, request.x0, request.n,
                              request.horizon, request.seed,
                              phi=request.phi, psi=request.psi)
    except ConfigError as e:
        raise _bad_request("config", e) from e
