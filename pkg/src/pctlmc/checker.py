"""PCTL evaluation over kernel models.

The central object is the one-step transfer operator

    L[W](x) = 1 on psi;  integral of Q(x, dy) W(y) on phi \\ psi;  0 elsewhere,

realized on a grid as a matrix-vector product plus tail attribution.  Its
iterates from the indicator of psi are exactly the bounded-until hitting
probabilities, and their pointwise limit (the least nonnegative fixed point
of L) is the unbounded-until probability.  Iteration therefore always starts
from the indicator of psi: when the fixed point is not unique, that starting
point selects the meaningful solution.

Off-grid (tail) states are attributed analytically: a tail inside psi
contributes value 1, a tail outside phi and psi contributes 0, and a tail
intersecting phi \\ psi is rejected whenever transient cells actually leak
probability into it (the grid must cover phi \\ psi wherever it matters).
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from .formula import (
    And,
    Atom,
    BoundedUntil,
    Eventually,
    FalseFormula,
    Implies,
    Next,
    Not,
    Or,
    PathFormula,
    Prob,
    StateFormula,
    TrueFormula,
    Until,
    desugar,
    pretty,
)
from .kernel import (
    DiscretizedKernel,
    FiniteKernel,
    Grid,
    Kernel,
    KernelError,
    Region,
    discretize,
)

__all__ = [
    "DEFAULT_MAX_ITER",
    "DEFAULT_TOL",
    "FixpointReport",
    "Model",
    "NonConvergenceError",
    "SatSet",
    "TailCoverageError",
    "UnboundAtomError",
    "ValueFunction",
    "apply_L",
    "bounded_until",
    "check",
    "contraction_factor",
    "next_values",
    "path_probabilities",
    "simulate_until",
    "threshold_set",
    "unbounded_until",
]

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 10**6

_REL_OPS = {"<": np.less, "<=": np.less_equal, ">": np.greater, ">=": np.greater_equal}


class UnboundAtomError(ValueError):
    """A formula references an atom with no region bound in the model."""

    def __init__(self, name: str, available):
        super().__init__(f"atom {name!r} is not bound to a region (available: {sorted(available)})")
        self.name = name


class TailCoverageError(ValueError):
    """Probability leaks off-grid into phi \\ psi, where values are unknown."""


class NonConvergenceError(RuntimeError):
    """Fixed-point iteration hit max_iter with residual above tolerance."""

    def __init__(self, report: "FixpointReport"):
        super().__init__(
            f"no convergence after {report.iterations} iterations "
            f"(residual {report.final_residual:.3e}, contraction factor {report.alpha:.6f})"
        )
        self.report = report


# ---------------------------------------------------------------------------
# Value-carrying types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SatSet:
    """Set of satisfying states: a cell mask plus membership of the two tails."""

    mask: np.ndarray
    lower_tail: bool = False
    upper_tail: bool = False

    def __post_init__(self):
        m = np.asarray(self.mask, dtype=bool)
        m.flags.writeable = False
        object.__setattr__(self, "mask", m)

    def __and__(self, other: "SatSet") -> "SatSet":
        return SatSet(self.mask & other.mask, self.lower_tail and other.lower_tail,
                      self.upper_tail and other.upper_tail)

    def __or__(self, other: "SatSet") -> "SatSet":
        return SatSet(self.mask | other.mask, self.lower_tail or other.lower_tail,
                      self.upper_tail or other.upper_tail)

    def __invert__(self) -> "SatSet":
        return SatSet(~self.mask, not self.lower_tail, not self.upper_tail)

    @property
    def cell_count(self) -> int:
        return int(self.mask.sum())

    def intervals(self, grid: Grid) -> list[tuple[float, float]]:
        """Maximal runs of satisfying cells, as closed intervals of centers."""
        centers = grid.centers
        out = []
        start = None
        for i, flag in enumerate(self.mask):
            if flag and start is None:
                start = i
            elif not flag and start is not None:
                out.append((float(centers[start]), float(centers[i - 1])))
                start = None
        if start is not None:
            out.append((float(centers[start]), float(centers[-1])))
        return out


@dataclass(frozen=True)
class ValueFunction:
    """Per-cell probabilities in [0, 1] plus values attributed to the tails."""

    values: np.ndarray
    lower_tail_value: float = 0.0
    upper_tail_value: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if np.any(v < -1e-12) or np.any(v > 1 + 1e-12):
            raise ValueError("value function entries must lie in [0, 1]")
        v = np.clip(v, 0.0, 1.0)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        for name in ("lower_tail_value", "upper_tail_value"):
            t = float(getattr(self, name))
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {t!r}")


@dataclass(frozen=True)
class FixpointReport:
    """Diagnostics of a fixed-point run: step count, last sup-norm residual,
    and the measured one-step contraction factor (1-capped)."""

    iterations: int
    final_residual: float
    alpha: float
    converged: bool = True


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------

class Model:
    """A kernel, its grid discretization, and named regions for the atoms.

    Region placement is validated on construction so that cells are never
    split by a region: for continuous kernels every finite region endpoint
    interior to the grid must lie on a cell boundary, and each off-grid tail
    must fall entirely inside or entirely outside every named region.  For
    finite chains the requirement is instead that each state agrees with its
    cell center on membership (tails carry no probability there).
    """

    def __init__(self, kernel: Kernel, grid: Grid, regions: dict[str, Region],
                 dk: DiscretizedKernel | None = None):
        self.kernel = kernel
        self.grid = grid
        self.regions = MappingProxyType(dict(regions))
        self.dk = dk if dk is not None else discretize(kernel, grid)
        if self.dk.grid != grid:
            raise KernelError("discretized kernel was built on a different grid")
        for name, region in self.regions.items():
            self._validate_region(name, region)

    def _validate_region(self, name: str, region: Region) -> None:
        g = self.grid
        if isinstance(self.kernel, FiniteKernel):
            centers = g.centers
            for v in self.kernel.state_values:
                cell = g.cell_of(float(v))
                if cell is not None and region.contains(float(centers[cell])) != region.contains(float(v)):
                    raise KernelError(
                        f"region {name!r} separates state {v!r} from its cell center"
                    )
            return
        rel_tol = 1e-9 * max(1.0, abs(g.lo), abs(g.hi))
        for lo, hi in region.intervals:
            for endpoint in (lo, hi):
                if not (g.lo < endpoint < g.hi):
                    continue
                steps = (endpoint - g.lo) / g.width
                if abs(steps - round(steps)) * g.width > rel_tol:
                    raise KernelError(
                        f"region {name!r} endpoint {endpoint!r} does not lie on a cell boundary"
                    )
        for side, covers, meets in (
            ("lower", region.covers_ray_below(g.lo), region.meets_ray_below(g.lo)),
            ("upper", region.covers_ray_above(g.hi), region.meets_ray_above(g.hi)),
        ):
            if meets and not covers:
                raise KernelError(
                    f"region {name!r} covers the {side} grid tail only partially; "
                    f"extend the grid or the region"
                )

    def region_set(self, name: str) -> SatSet:
        if name not in self.regions:
            raise UnboundAtomError(name, self.regions)
        region = self.regions[name]
        mask = region.mask(self.grid.centers)
        if isinstance(self.kernel, FiniteKernel):
            return SatSet(mask)  # tails carry no probability for finite chains
        return SatSet(mask, region.covers_ray_below(self.grid.lo),
                      region.covers_ray_above(self.grid.hi))

    def everything(self) -> SatSet:
        return SatSet(np.ones(self.grid.cells, dtype=bool), True, True)

    def nothing(self) -> SatSet:
        return SatSet(np.zeros(self.grid.cells, dtype=bool), False, False)


# ---------------------------------------------------------------------------
# The transfer operator and its iterations
# ---------------------------------------------------------------------------

def _tail_weight(phi_flag: bool, psi_flag: bool, carried: float) -> float:
    if psi_flag:
        return 1.0
    if phi_flag:
        return carried
    return 0.0


def apply_L(dk: DiscretizedKernel, phi: SatSet, psi: SatSet, w: ValueFunction) -> ValueFunction:
    """One application of the transfer operator on the grid.

    Output is 1 on psi cells, the kernel average of w on phi \\ psi cells,
    and 0 elsewhere; tails are attributed by region membership (1 inside
    psi, 0 outside phi and psi, carried value inside phi \\ psi).  The
    caller is responsible for tail coverage when iterating.
    """
    n = dk.grid.cells
    if w.values.shape != (n,) or phi.mask.shape != (n,) or psi.mask.shape != (n,):
        raise ValueError("operator operands do not match the grid")
    w_lower = _tail_weight(phi.lower_tail, psi.lower_tail, w.lower_tail_value)
    w_upper = _tail_weight(phi.upper_tail, psi.upper_tail, w.upper_tail_value)
    integral = dk.matrix @ w.values + dk.lower_tail * w_lower + dk.upper_tail * w_upper
    transient = phi.mask & ~psi.mask
    out = np.where(psi.mask, 1.0, np.where(transient, np.clip(integral, 0.0, 1.0), 0.0))
    # the attributed tail values coincide with the weights just used
    return ValueFunction(out, w_lower, w_upper)


def _indicator(psi: SatSet) -> ValueFunction:
    return ValueFunction(psi.mask.astype(float),
                         1.0 if psi.lower_tail else 0.0,
                         1.0 if psi.upper_tail else 0.0)


def _ensure_tail_coverage(dk: DiscretizedKernel, phi: SatSet, psi: SatSet) -> None:
    transient = phi.mask & ~psi.mask
    if not transient.any():
        return
    leaks_low = phi.lower_tail and not psi.lower_tail and float(dk.lower_tail[transient].max()) > 0.0
    leaks_high = phi.upper_tail and not psi.upper_tail and float(dk.upper_tail[transient].max()) > 0.0
    if leaks_low or leaks_high:
        side = "lower" if leaks_low else "upper"
        raise TailCoverageError(
            f"transient mass escapes into the {side} grid tail inside phi \\ psi; "
            f"enlarge the grid so it covers phi \\ psi"
        )


def bounded_until(model: Model, phi: SatSet, psi: SatSet, k: int) -> list[ValueFunction]:
    """Hitting probabilities V_0 .. V_k of "psi within i steps through phi".

    V_0 is the indicator of psi and V_{i+1} = L[V_i]; the returned sequence
    is pointwise nondecreasing.
    """
    if k < 0:
        raise ValueError(f"horizon must be nonnegative, got {k}")
    _ensure_tail_coverage(model.dk, phi, psi)
    seq = [_indicator(psi)]
    for _ in range(k):
        seq.append(apply_L(model.dk, phi, psi, seq[-1]))
    return seq


def unbounded_until(model: Model, phi: SatSet, psi: SatSet,
                    tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                    ) -> tuple[ValueFunction, FixpointReport]:
    """Least nonnegative fixed point of L, by iteration from the psi indicator.

    Stops once the sup-norm step residual drops below tol; hitting max_iter
    first is reported (converged=False), not raised, so callers can still
    inspect the last iterate.
    """
    if tol <= 0:
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be at least 1, got {max_iter}")
    _ensure_tail_coverage(model.dk, phi, psi)
    alpha = contraction_factor(model, phi, psi)
    v = _indicator(psi)
    residual = np.inf
    iterations = 0
    for iterations in range(1, max_iter + 1):
        nxt = apply_L(model.dk, phi, psi, v)
        residual = float(np.max(np.abs(nxt.values - v.values))) if v.values.size else 0.0
        v = nxt
        if residual < tol:
            return v, FixpointReport(iterations, residual, alpha, converged=True)
    return v, FixpointReport(iterations, residual, alpha, converged=False)


def next_values(model: Model, phi: SatSet) -> ValueFunction:
    """One-step probabilities of landing in phi, from every cell center.

    Tail values of the result are 0: off-grid source states have no kernel
    row, and the checker's convention assigns them probability 0 (they only
    enter downstream evaluations where their one-step mass vanishes).
    """
    dk = model.dk
    w = phi.mask.astype(float)
    out = dk.matrix @ w
    if phi.lower_tail:
        out = out + dk.lower_tail
    if phi.upper_tail:
        out = out + dk.upper_tail
    return ValueFunction(np.clip(out, 0.0, 1.0))


def contraction_factor(model: Model, phi: SatSet, psi: SatSet) -> float:
    """Largest one-step probability of staying inside phi \\ psi (1-capped).

    Below 1 this is a contraction modulus for the transfer operator:
    iteration residuals shrink at least geometrically at this rate and the
    fixed point is unique.  Returns 0 when phi \\ psi covers no cells.
    """
    transient = phi.mask & ~psi.mask
    if not transient.any():
        return 0.0
    dk = model.dk
    stay = dk.matrix[transient][:, transient].sum(axis=1)
    if phi.lower_tail and not psi.lower_tail:
        stay = stay + dk.lower_tail[transient]
    if phi.upper_tail and not psi.upper_tail:
        stay = stay + dk.upper_tail[transient]
    return min(float(stay.max()), 1.0)


def threshold_set(v: ValueFunction, rel: str, p: float) -> SatSet:
    """Cells (and tails) whose value compares to p under rel, exactly as stated."""
    if rel not in _REL_OPS:
        raise ValueError(f"relation must be one of {tuple(_REL_OPS)}, got {rel!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {p!r}")
    op = _REL_OPS[rel]
    return SatSet(op(v.values, p),
                  bool(op(v.lower_tail_value, p)),
                  bool(op(v.upper_tail_value, p)))


# ---------------------------------------------------------------------------
# Recursive formula evaluation
# ---------------------------------------------------------------------------

def path_probabilities(model: Model, pf: PathFormula,
                       tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
                       trace: list | None = None) -> ValueFunction:
    """Per-state probability of the path formula, resolving sub-formulas first.

    Appends one record per until evaluation to trace (when given).  Raises
    NonConvergenceError if an unbounded until fails to converge; the record
    is appended before raising so reports stay complete.
    """
    if isinstance(pf, Next):
        phi = check(model, pf.child, tol=tol, max_iter=max_iter, trace=trace)
        return next_values(model, phi)
    if isinstance(pf, BoundedUntil):
        phi = check(model, pf.left, tol=tol, max_iter=max_iter, trace=trace)
        psi = check(model, pf.right, tol=tol, max_iter=max_iter, trace=trace)
        seq = bounded_until(model, phi, psi, pf.bound)
        if trace is not None:
            residual = float(np.max(np.abs(seq[-1].values - seq[-2].values))) if len(seq) > 1 else 0.0
            trace.append({
                "operator": pretty(pf),
                "kind": "bounded",
                "iterations": pf.bound,
                "final_residual": residual,
                "alpha": contraction_factor(model, phi, psi),
                "converged": True,
            })
        return seq[-1]
    if isinstance(pf, Until):
        phi = check(model, pf.left, tol=tol, max_iter=max_iter, trace=trace)
        psi = check(model, pf.right, tol=tol, max_iter=max_iter, trace=trace)
        v, report = unbounded_until(model, phi, psi, tol=tol, max_iter=max_iter)
        if trace is not None:
            trace.append({
                "operator": pretty(pf),
                "kind": "unbounded",
                "iterations": report.iterations,
                "final_residual": report.final_residual,
                "alpha": report.alpha,
                "converged": report.converged,
            })
        if not report.converged:
            raise NonConvergenceError(report)
        return v
    raise TypeError(f"path formula contains unresolved sugar: {pf!r}")


def check(model: Model, f: StateFormula,
          tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER,
          trace: list | None = None) -> SatSet:
    """Satisfaction set of a state formula, evaluated at every grid cell.

    Boolean connectives act on sets; probability operators threshold the
    value function of their path formula.  Nested probability operators are
    supported: inner satisfaction sets become the phi / psi sets of outer
    operators.  Desugaring is applied internally.
    """
    f = desugar(f)
    return _check(model, f, tol, max_iter, trace)


def _check(model: Model, f: StateFormula, tol: float, max_iter: int,
           trace: list | None) -> SatSet:
    if isinstance(f, TrueFormula):
        return model.everything()
    if isinstance(f, FalseFormula):
        return model.nothing()
    if isinstance(f, Atom):
        return model.region_set(f.name)
    if isinstance(f, Not):
        return ~_check(model, f.child, tol, max_iter, trace)
    if isinstance(f, And):
        return _check(model, f.left, tol, max_iter, trace) & _check(model, f.right, tol, max_iter, trace)
    if isinstance(f, Or):
        return _check(model, f.left, tol, max_iter, trace) | _check(model, f.right, tol, max_iter, trace)
    if isinstance(f, Implies):
        return (~_check(model, f.left, tol, max_iter, trace)) | _check(model, f.right, tol, max_iter, trace)
    if isinstance(f, Prob):
        v = path_probabilities(model, f.path, tol=tol, max_iter=max_iter, trace=trace)
        return threshold_set(v, f.rel, f.p)
    raise TypeError(f"not a state formula: {f!r}")


# ---------------------------------------------------------------------------
# Monte Carlo cross-check
# ---------------------------------------------------------------------------

def simulate_until(model: Model, x0: float, phi: Region, psi: Region,
                   horizon: int, n: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of reaching psi through phi within the horizon.

    Works directly on the kernel and the exact regions (no grid), so it is
    an independent cross-check of the dynamic-programming values.  Returns
    (estimate, half_width) with half_width = 3 * sqrt(est * (1 - est) / n);
    results are deterministic for a fixed seed.
    """
    if n < 1:
        raise ValueError(f"need at least one trajectory, got {n}")
    if horizon < 0:
        raise ValueError(f"horizon must be nonnegative, got {horizon}")
    if psi.contains(x0):
        return 1.0, 0.0
    if not phi.contains(x0):
        return 0.0, 0.0

    rng = np.random.default_rng(seed)
    finite = isinstance(model.kernel, FiniteKernel)
    if finite:
        state = np.full(n, model.kernel.state_index(x0), dtype=int)
        coords = model.kernel.state_values
    else:
        position = np.full(n, float(x0))

    hits = 0
    active = np.ones(n, dtype=bool)
    for _ in range(horizon):
        if not active.any():
            break
        if finite:
            state[active] = model.kernel.sample_next(rng, state[active])
            xs = coords[state[active]]
        else:
            position[active] = model.kernel.sample_next(rng, position[active])
            xs = position[active]
        in_psi = psi.mask(xs)
        in_phi = phi.mask(xs)
        hits += int(in_psi.sum())
        idx = np.nonzero(active)[0]
        active[idx[in_psi | ~in_phi]] = False

    estimate = hits / n
    half_width = 3.0 * float(np.sqrt(estimate * (1.0 - estimate) / n))
    return estimate, half_width
