"""Stochastic kernels on the real line and their grid discretizations.

Two kernel families are supported: finite transition matrices whose states
are embedded on the real line, and affine-Gaussian kernels mapping a state x
to the normal law N(mean_fn(x), std_fn(x)^2).  A :class:`DiscretizedKernel`
is the computational proxy used by the checker: a row-stochastic cell-to-cell
matrix plus per-row probability masses falling below and above the grid.

Conventions: grid cells are half-open ``[edge_j, edge_{j+1})``; region
membership of a cell is decided by its center point; Gaussian cell masses are
distribution-function differences at the exact cell edges, so each row sums
to one by construction (no renormalization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np
from scipy.special import ndtr

__all__ = [
    "AffineGaussianKernel",
    "DiscretizedKernel",
    "FiniteKernel",
    "Grid",
    "Kernel",
    "KernelError",
    "Region",
    "discretize",
    "mass",
]

INF = math.inf

ROW_SUM_TOL = 1e-12          # finite transition matrices
DISCRETIZATION_TOL = 1e-9    # row sum + tails of a discretized kernel


class KernelError(ValueError):
    """Invalid kernel, grid, or discretization input."""


# ---------------------------------------------------------------------------
# Regions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Region:
    """Finite union of closed real intervals, possibly unbounded.

    Intervals are normalized on construction: sorted ascending and merged
    when they overlap or touch, so the stored tuple is pairwise disjoint.
    The empty tuple encodes the empty set.  Endpoint openness is not
    tracked; it is measure-zero for the continuous kernels and the checker
    classifies grid cells by their center points anyway.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        merged: list[list[float]] = []
        for lo, hi in sorted(self.intervals):
            lo, hi = float(lo), float(hi)
            if math.isnan(lo) or math.isnan(hi):
                raise KernelError("region endpoints must not be NaN")
            if lo > hi:
                raise KernelError(f"region interval has lo > hi: ({lo}, {hi})")
            if merged and lo <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        object.__setattr__(self, "intervals", tuple((a, b) for a, b in merged))

    @classmethod
    def empty(cls) -> "Region":
        return cls(())

    @classmethod
    def whole_line(cls) -> "Region":
        return cls(((-INF, INF),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, x: float) -> bool:
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def mask(self, xs: np.ndarray) -> np.ndarray:
        """Boolean membership for an array of points."""
        out = np.zeros(np.shape(xs), dtype=bool)
        for lo, hi in self.intervals:
            out |= (xs >= lo) & (xs <= hi)
        return out

    # Relations against the open rays (-inf, c) and (c, +inf), used to decide
    # whether a grid tail lies inside, outside, or across a region.
    def covers_ray_below(self, c: float) -> bool:
        return bool(self.intervals) and self.intervals[0][0] == -INF and self.intervals[0][1] >= c

    def meets_ray_below(self, c: float) -> bool:
        return any(lo < c for lo, hi in self.intervals)

    def covers_ray_above(self, c: float) -> bool:
        return bool(self.intervals) and self.intervals[-1][1] == INF and self.intervals[-1][0] <= c

    def meets_ray_above(self, c: float) -> bool:
        return any(hi > c for lo, hi in self.intervals)

    def __str__(self) -> str:
        if not self.intervals:
            return "{}"
        return " u ".join(f"[{lo:g}, {hi:g}]" for lo, hi in self.intervals)


# ---------------------------------------------------------------------------
# Grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    """Uniform partition of [lo, hi) into half-open cells."""

    lo: float
    hi: float
    cells: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise KernelError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if not isinstance(self.cells, int) or self.cells < 1:
            raise KernelError(f"grid needs at least one cell, got {self.cells!r}")

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.cells

    @cached_property
    def edges(self) -> np.ndarray:
        e = np.linspace(self.lo, self.hi, self.cells + 1)
        e.flags.writeable = False
        return e

    @cached_property
    def centers(self) -> np.ndarray:
        c = (self.edges[:-1] + self.edges[1:]) / 2.0
        c.flags.writeable = False
        return c

    def cell_of(self, x: float) -> int | None:
        """Index of the cell containing x, or None when x is off-grid."""
        if x < self.lo or x >= self.hi:
            return None
        return min(int((x - self.lo) / self.width), self.cells - 1)


# ---------------------------------------------------------------------------
# Kernels
# ---------------------------------------------------------------------------

class FiniteKernel:
    """Transition matrix over n states embedded on the real line.

    Each state i carries a real coordinate ``state_values[i]``; regions and
    grids address states through these coordinates, so finite chains run
    through the same checking pipeline as continuous ones.
    """

    def __init__(self, matrix, state_values):
        P = np.array(matrix, dtype=float)
        values = np.array(state_values, dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise KernelError(f"transition matrix must be square, got shape {P.shape}")
        if values.shape != (P.shape[0],):
            raise KernelError("state_values length must match the matrix dimension")
        if np.unique(values).size != values.size:
            raise KernelError("state_values must be pairwise distinct")
        if np.any(P < -ROW_SUM_TOL) or np.any(P > 1 + ROW_SUM_TOL):
            raise KernelError("transition probabilities must lie in [0, 1]")
        bad = np.abs(P.sum(axis=1) - 1.0) > ROW_SUM_TOL
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise KernelError(f"row {i} sums to {P[i].sum()!r}, expected 1")
        order = np.argsort(values)
        self.matrix = np.clip(P[order][:, order], 0.0, 1.0)
        self.state_values = values[order]
        self.matrix.flags.writeable = False
        self.state_values.flags.writeable = False

    @property
    def n_states(self) -> int:
        return self.state_values.size

    def state_index(self, x: float) -> int:
        """Index of the chain state nearest to x (ties resolve downward)."""
        return int(np.argmin(np.abs(self.state_values - x)))

    def mass(self, x: float, region: Region) -> float:
        row = self.matrix[self.state_index(x)]
        return float(row[region.mask(self.state_values)].sum())

    def sample_next(self, rng: np.random.Generator, indices: np.ndarray) -> np.ndarray:
        cum = np.cumsum(self.matrix, axis=1)
        u = rng.random(indices.size)
        return (u[:, None] > cum[indices]).sum(axis=1)


class AffineGaussianKernel:
    """Kernel x -> N(mean_fn(x), std_fn(x)^2); std 0 degenerates to a point mass."""

    def __init__(self, mean_fn: Callable[[float], float], std_fn: Callable[[float], float]):
        self.mean_fn = mean_fn
        self.std_fn = std_fn

    def params_at(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized (means, stds) at the given points; stds must be >= 0."""
        m = self._eval(self.mean_fn, xs)
        s = self._eval(self.std_fn, xs)
        if np.any(s < 0) or not (np.all(np.isfinite(m)) and np.all(np.isfinite(s))):
            raise KernelError("std_fn must be finite and nonnegative on all queried states")
        return m, s

    @staticmethod
    def _eval(fn, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        try:
            out = np.asarray(fn(xs), dtype=float)
            if out.shape == xs.shape:
                return out
        except (TypeError, ValueError):
            pass
        return np.array([fn(float(x)) for x in np.atleast_1d(xs)], dtype=float).reshape(xs.shape)

    def mass(self, x: float, region: Region) -> float:
        m, s = self.params_at(np.array([x]))
        m, s = float(m[0]), float(s[0])
        if s == 0.0:
            return 1.0 if region.contains(m) else 0.0
        total = 0.0
        for lo, hi in region.intervals:
            total += float(ndtr((hi - m) / s) - ndtr((lo - m) / s))
        return min(max(total, 0.0), 1.0)

    def sample_next(self, rng: np.random.Generator, xs: np.ndarray) -> np.ndarray:
        m, s = self.params_at(xs)
        return rng.normal(m, s)


Kernel = Union[FiniteKernel, AffineGaussianKernel]


def mass(kernel: Kernel, x: float, region: Region) -> float:
    """Exact probability the kernel moves from x into the region.

    For finite kernels x is mapped to the nearest chain state.  Gaussian
    masses come from distribution-function differences at the interval
    endpoints (infinite endpoints give the 0/1 limits).
    """
    return kernel.mass(x, region)


# ---------------------------------------------------------------------------
# Discretization
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscretizedKernel:
    """Row-stochastic cell-to-cell matrix plus per-row off-grid tail masses."""

    matrix: np.ndarray
    lower_tail: np.ndarray
    upper_tail: np.ndarray
    grid: Grid

    def __post_init__(self):
        n = self.grid.cells
        if self.matrix.shape != (n, n) or self.lower_tail.shape != (n,) or self.upper_tail.shape != (n,):
            raise KernelError("discretized kernel arrays do not match the grid")
        total = self.matrix.sum(axis=1) + self.lower_tail + self.upper_tail
        if np.any(np.abs(total - 1.0) > DISCRETIZATION_TOL):
            worst = int(np.argmax(np.abs(total - 1.0)))
            raise KernelError(f"row {worst} masses sum to {total[worst]!r}, expected 1")
        for arr in (self.matrix, self.lower_tail, self.upper_tail):
            if np.any(arr < -DISCRETIZATION_TOL) or np.any(arr > 1 + DISCRETIZATION_TOL):
                raise KernelError("discretized masses must lie in [0, 1]")
            arr.flags.writeable = False


def discretize(kernel: Kernel, grid: Grid) -> DiscretizedKernel:
    """Evaluate one-step masses from every cell center into every cell.

    Entry (i, j) is the kernel mass from center c_i into cell j; the tail
    vectors hold the mass falling below grid.lo and at/above grid.hi.  For
    finite kernels every state must fall in a distinct grid cell; cell rows
    are the row of the nearest state, so states act as cell representatives.
    """
    if isinstance(kernel, FiniteKernel):
        return _discretize_finite(kernel, grid)
    return _discretize_gaussian(kernel, grid)


def _discretize_finite(kernel: FiniteKernel, grid: Grid) -> DiscretizedKernel:
    n = kernel.n_states
    state_cells = []
    for v in kernel.state_values:
        cell = grid.cell_of(float(v))
        if cell is None:
            raise KernelError(f"state value {v!r} is not representable on the grid")
        state_cells.append(cell)
    if len(set(state_cells)) != n:
        raise KernelError("grid too coarse: two chain states share a cell")

    # Mass from state row s into cells: scatter columns by target state cell.
    per_state = np.zeros((n, grid.cells))
    for j, cell in enumerate(state_cells):
        per_state[:, cell] += kernel.matrix[:, j]

    # Every cell row mirrors its nearest state, so cells without a state of
    # their own stay consistent with mass(kernel, center, .).
    nearest = np.array([kernel.state_index(c) for c in grid.centers])
    matrix = per_state[nearest]
    zeros = np.zeros(grid.cells)
    return DiscretizedKernel(matrix, zeros, zeros.copy(), grid)


def _discretize_gaussian(kernel: AffineGaussianKernel, grid: Grid) -> DiscretizedKernel:
    centers = grid.centers
    edges = grid.edges
    m, s = kernel.params_at(centers)
    matrix = np.zeros((grid.cells, grid.cells))
    lower = np.zeros(grid.cells)
    upper = np.zeros(grid.cells)

    spread = s > 0.0
    if np.any(spread):
        z = (edges[None, :] - m[spread, None]) / s[spread, None]
        cdf = ndtr(z)
        matrix[spread] = np.diff(cdf, axis=1)
        lower[spread] = cdf[:, 0]
        upper[spread] = 1.0 - cdf[:, -1]

    for i in np.nonzero(~spread)[0]:
        target = float(m[i])
        cell = grid.cell_of(target)
        if cell is not None:
            matrix[i, cell] = 1.0
        elif target < grid.lo:
            lower[i] = 1.0
        else:
            upper[i] = 1.0

    return DiscretizedKernel(np.clip(matrix, 0.0, 1.0), lower, upper, grid)
