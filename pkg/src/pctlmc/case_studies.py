"""Built-in benchmark models: fishery recovery and an early-retirement fund.

Both models have dynamics that are affine in independent Gaussian shocks for
each fixed state, so the one-step law is Gaussian exactly and the kernel can
be written in closed form (mean / variance composition) instead of being
estimated by sampling.

Fishery biomass (one step per season)::

    x' = (1 - nu) x + gamma R(x) - delta C(x)
    R(x) = max(r x (1 - x / (2 K)), 0)
    nu ~ N(0.2, 0.1^2), gamma ~ N(1, 0.6^2), delta ~ N(1.1, 0.2^2)

with K = 200, r = 1, and three catch policies: a constant maximum-
sustainable-yield quota, a harvest control rule proportional to stock below
K, and a complete fishing stop.  States are biomass on [0, 400]; the target
region is [150, 400] and the safe region is the positive part of the grid
(ruin exits through the lower tail).

Retirement fund (one step per year)::

    x' = a x (1 + S) + b x (1 + R) + c x + 2500
    S ~ N(0.03, 0.005^2), R ~ N(0.1, 0.2^2), a + b + c = 1

States are fund value on [0, 200000]; the target region [200000, inf) lies
entirely in the upper grid tail and the safe region is [0, inf).  No state
clamping is applied in either model: mass pushed below zero flows to the
lower tail and is attributed value 0, consistent with ruin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .checker import Model
from .kernel import AffineGaussianKernel, Grid, Region

__all__ = [
    "CATCH_MSY",
    "FISHERY_STRATEGIES",
    "PortfolioStrategy",
    "fishery_catch",
    "fishery_model",
    "fishery_recruitment",
    "retirement_model",
]

# Fishery constants
BIOMASS_HALF_LIMIT = 200.0       # K; the biomass limit is 2K = 400
RECRUITMENT_RATE = 1.0           # r
MORTALITY_MEAN = 0.2             # mu, also the mean of nu
MORTALITY_STD = 0.1
RECRUITMENT_STD = 0.6
CATCH_MEAN = 1.1
CATCH_STD = 0.2
CATCH_MSY = BIOMASS_HALF_LIMIT * (RECRUITMENT_RATE - MORTALITY_MEAN) ** 2 / (2 * RECRUITMENT_RATE)

FISHERY_STRATEGIES = ("msy", "hcr", "stop")

# Retirement constants
SAFE_RETURN_MEAN = 0.03
SAFE_RETURN_STD = 0.005
RISKY_RETURN_MEAN = 0.1
RISKY_RETURN_STD = 0.2
YEARLY_CONTRIBUTION = 2500.0


def fishery_recruitment(x):
    """Season recruitment max(r x (1 - x / (2K)), 0); clamps to 0 beyond 2K."""
    return np.maximum(RECRUITMENT_RATE * x * (1.0 - x / (2.0 * BIOMASS_HALF_LIMIT)), 0.0)


def fishery_catch(strategy: str, x):
    """Target catch under the given policy (continuous in x for the HCR)."""
    if strategy == "msy":
        return np.full_like(np.asarray(x, dtype=float), CATCH_MSY)[()]
    if strategy == "hcr":
        return np.where(np.asarray(x, dtype=float) < BIOMASS_HALF_LIMIT,
                        CATCH_MSY * np.asarray(x, dtype=float) / BIOMASS_HALF_LIMIT,
                        CATCH_MSY)[()]
    if strategy == "stop":
        return np.zeros_like(np.asarray(x, dtype=float))[()]
    raise ValueError(f"unknown fishery strategy {strategy!r}; expected one of {FISHERY_STRATEGIES}")


def fishery_model(strategy: str, grid_cells: int = 800) -> Model:
    """Fishery recovery model under a catch policy ("msy", "hcr", or "stop")."""
    if strategy not in FISHERY_STRATEGIES:
        raise ValueError(f"unknown fishery strategy {strategy!r}; expected one of {FISHERY_STRATEGIES}")

    def mean(x):
        return (1.0 - MORTALITY_MEAN) * x + fishery_recruitment(x) - CATCH_MEAN * fishery_catch(strategy, x)

    def std(x):
        return np.sqrt(
            np.asarray(x, dtype=float) ** 2 * MORTALITY_STD**2
            + fishery_recruitment(x) ** 2 * RECRUITMENT_STD**2
            + np.asarray(fishery_catch(strategy, x), dtype=float) ** 2 * CATCH_STD**2
        )

    grid = Grid(0.0, 2.0 * BIOMASS_HALF_LIMIT, grid_cells)
    regions = {
        "target": Region(((150.0, 400.0),)),
        # Safe means positive biomass up to the limit; every cell center of
        # the [0, 400] grid is positive, so the closed left endpoint loses
        # nothing.  Ruin exits through the lower grid tail.
        "safe": Region(((0.0, 400.0),)),
    }
    return Model(AffineGaussianKernel(mean, std), grid, regions)


@dataclass(frozen=True)
class PortfolioStrategy:
    """Capital split: a in the safe asset, b in the risky asset, c uninvested."""

    a: float
    b: float
    c: float

    def __post_init__(self):
        for name, value in (("a", self.a), ("b", self.b), ("c", self.c)):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"portfolio fraction {name} must lie in [0, 1], got {value!r}")
        if abs(self.a + self.b + self.c - 1.0) > 1e-12:
            raise ValueError(f"portfolio fractions must sum to 1, got {self.a + self.b + self.c!r}")

    @property
    def drift(self) -> float:
        return self.a * (1.0 + SAFE_RETURN_MEAN) + self.b * (1.0 + RISKY_RETURN_MEAN) + self.c

    @property
    def volatility(self) -> float:
        return math.sqrt(self.a**2 * SAFE_RETURN_STD**2 + self.b**2 * RISKY_RETURN_STD**2)


def retirement_model(strategy: PortfolioStrategy, grid_cells: int = 2000) -> Model:
    """Retirement-fund model for a fixed portfolio split.

    The target region [200000, inf) lies entirely in the upper grid tail, so
    overshooting the grid counts as reaching the target; s(0) = 0 makes the
    first step from an empty fund a deterministic jump to the contribution.
    """
    drift = strategy.drift
    vol = strategy.volatility

    def mean(x):
        return np.asarray(x, dtype=float) * drift + YEARLY_CONTRIBUTION

    def std(x):
        return np.asarray(x, dtype=float) * vol

    grid = Grid(0.0, 200000.0, grid_cells)
    regions = {
        "target": Region(((200000.0, math.inf),)),
        "safe": Region(((0.0, math.inf),)),
    }
    return Model(AffineGaussianKernel(mean, std), grid, regions)
