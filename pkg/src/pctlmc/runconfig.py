"""Run configuration: a single JSON document describing model, grid, regions,
solver, and optional simulation defaults.

Top-level keys: ``model`` (required), ``grid``, ``regions``, ``solver``,
``simulation``.  Region intervals are two-element arrays whose endpoints may
be the strings ``"-inf"`` / ``"inf"``.  Built-in models supply default grids
and ``target`` / ``safe`` regions; user entries override by name.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import case_studies
from .checker import Model
from .kernel import AffineGaussianKernel, FiniteKernel, Grid, KernelError, Region

__all__ = [
    "ConfigError",
    "GridSpec",
    "RunConfig",
    "SimulationSpec",
    "SolverSpec",
    "build_model",
    "load_config",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10**6


class ConfigError(ValueError):
    """Invalid run configuration (schema, values, or model construction)."""


class GridSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    lo: float
    hi: float
    cells: int = Field(ge=1)


class SolverSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    tol: float = Field(default=DEFAULT_TOL, gt=0)
    max_iter: int = Field(default=DEFAULT_MAX_ITER, ge=1)


class SimulationSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    x0: list[float] = Field(default_factory=list)
    n: int = Field(default=10000, ge=1)
    horizon: int = Field(default=10, ge=0)
    seed: int = 0
    phi: str = "safe"
    psi: str = "target"


class FisherySpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["fishery"]
    strategy: Literal["msy", "hcr", "stop"]


class PortfolioWeights(BaseModel):
    model_config = ConfigDict(extra="forbid")
    a: float = Field(ge=0, le=1)
    b: float = Field(ge=0, le=1)
    c: float = Field(ge=0, le=1)

    @model_validator(mode="after")
    def _sums_to_one(self):
        if abs(self.a + self.b + self.c - 1.0) > 1e-12:
            raise ValueError(f"portfolio fractions must sum to 1, got {self.a + self.b + self.c!r}")
        return self


class RetirementSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["retirement"]
    strategy: PortfolioWeights


class FiniteSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")
    type: Literal["finite"]
    matrix: list[list[float]]
    state_values: list[float]


class AffineGaussianSpec(BaseModel):
    """Kernel x -> N(m(x), s(x)^2) with affine m(x) and s(x): (slope, intercept)."""

    model_config = ConfigDict(extra="forbid")
    type: Literal["affine_gaussian"]
    mean: tuple[float, float]
    std: tuple[float, float]


ModelSpec = Annotated[
    Union[FisherySpec, RetirementSpec, FiniteSpec, AffineGaussianSpec],
    Field(discriminator="type"),
]

Endpoint = Union[float, Literal["inf", "-inf"]]


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")
    model: ModelSpec
    grid: GridSpec | None = None
    regions: dict[str, list[tuple[Endpoint, Endpoint]]] = Field(default_factory=dict)
    solver: SolverSpec = Field(default_factory=SolverSpec)
    simulation: SimulationSpec | None = None


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON configuration file."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    return config_from_dict(data)


def config_from_dict(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {e}") from e


def _endpoint(value: Endpoint) -> float:
    if value == "inf":
        return math.inf
    if value == "-inf":
        return -math.inf
    return float(value)


def _regions_from_spec(spec: dict[str, list[tuple[Endpoint, Endpoint]]]) -> dict[str, Region]:
    out = {}
    for name, pairs in spec.items():
        try:
            out[name] = Region(tuple((_endpoint(lo), _endpoint(hi)) for lo, hi in pairs))
        except KernelError as e:
            raise ConfigError(f"region {name!r}: {e}") from e
    return out


def _derived_finite_grid(state_values: list[float]) -> Grid:
    values = sorted(state_values)
    if len(values) == 1:
        return Grid(values[0] - 0.5, values[0] + 0.5, 1)
    gaps = [b - a for a, b in zip(values, values[1:])]
    span = values[-1] - values[0]
    if max(gaps) - min(gaps) > 1e-9 * max(1.0, span):
        raise ConfigError(
            "state_values are not evenly spaced; supply an explicit grid with one cell per state"
        )
    h = gaps[0]
    return Grid(values[0] - h / 2.0, values[-1] + h / 2.0, len(values))


def build_model(cfg: RunConfig) -> Model:
    """Construct the checkable model a configuration describes."""
    spec = cfg.model
    user_regions = _regions_from_spec(cfg.regions)
    try:
        if isinstance(spec, FisherySpec):
            base = case_studies.fishery_model(spec.strategy, cfg.grid.cells if cfg.grid else 800)
            grid = Grid(cfg.grid.lo, cfg.grid.hi, cfg.grid.cells) if cfg.grid else base.grid
            regions = {**base.regions, **user_regions}
            if grid == base.grid:
                return Model(base.kernel, grid, regions, dk=base.dk)
            return Model(base.kernel, grid, regions)
        if isinstance(spec, RetirementSpec):
            weights = case_studies.PortfolioStrategy(spec.strategy.a, spec.strategy.b, spec.strategy.c)
            base = case_studies.retirement_model(weights, cfg.grid.cells if cfg.grid else 2000)
            grid = Grid(cfg.grid.lo, cfg.grid.hi, cfg.grid.cells) if cfg.grid else base.grid
            regions = {**base.regions, **user_regions}
            if grid == base.grid:
                return Model(base.kernel, grid, regions, dk=base.dk)
            return Model(base.kernel, grid, regions)
        if isinstance(spec, FiniteSpec):
            kernel = FiniteKernel(spec.matrix, spec.state_values)
            grid = (Grid(cfg.grid.lo, cfg.grid.hi, cfg.grid.cells) if cfg.grid
                    else _derived_finite_grid(spec.state_values))
            return Model(kernel, grid, user_regions)
        if isinstance(spec, AffineGaussianSpec):
            if cfg.grid is None:
                raise ConfigError("affine_gaussian models require an explicit grid")
            m_slope, m_icept = spec.mean
            s_slope, s_icept = spec.std
            kernel = AffineGaussianKernel(
                lambda x: m_slope * x + m_icept,
                lambda x: s_slope * x + s_icept,
            )
            grid = Grid(cfg.grid.lo, cfg.grid.hi, cfg.grid.cells)
            return Model(kernel, grid, user_regions)
    except (KernelError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(str(e)) from e
    raise ConfigError(f"unknown model spec {spec!r}")
