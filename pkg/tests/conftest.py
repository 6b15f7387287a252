"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately avoid the library's own evaluation paths:
bounded-until values come from exhaustive path enumeration (additivity of
the path measure), unbounded values from a direct linear solve on the
transient block, and Gaussian masses from math.erf.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from pctlmc import FiniteKernel, Grid, Model, Region, SatSet, ValueFunction

THREE_STATE_MATRIX = [[0.5, 0.3, 0.2], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
ABSORBING_MATRIX = [[0.6, 0.4, 0.0], [0.3, 0.7, 0.0], [0.0, 0.0, 1.0]]


def three_state_model() -> Model:
    """Fixture chain: state0 -> {self: .5, psi: .3, sink: .2}; phi={state0}, psi={state1}."""
    kernel = FiniteKernel(THREE_STATE_MATRIX, [0.0, 1.0, 2.0])
    grid = Grid(-0.5, 2.5, 3)
    regions = {
        "phi": Region(((-0.25, 0.25),)),
        "psi": Region(((0.75, 1.25),)),
    }
    return Model(kernel, grid, regions)


def absorbing_model() -> Model:
    """Counterexample chain: the complement of psi={state2} is absorbing."""
    kernel = FiniteKernel(ABSORBING_MATRIX, [0.0, 1.0, 2.0])
    grid = Grid(-0.5, 2.5, 3)
    regions = {"psi": Region(((1.75, 2.25),))}
    return Model(kernel, grid, regions)


def random_finite_model(rng: np.random.Generator, n_states: int | None = None):
    """Random chain with Dirichlet rows plus a random phi/psi/outside labeling.

    Returns (model, phi, psi) with SatSets over the n-cell grid.  psi is
    forced nonempty when possible so the until problem is nontrivial.
    """
    n = int(n_states if n_states is not None else rng.integers(2, 5))
    P = rng.dirichlet(np.ones(n), size=n)
    model = Model(FiniteKernel(P, np.arange(n, dtype=float)),
                  Grid(-0.5, n - 0.5, n), {})
    labels = rng.integers(0, 3, size=n)
    if not (labels == 2).any():
        labels[int(rng.integers(0, n))] = 2
    psi = SatSet(labels == 2)
    phi = SatSet(labels == 1)
    return model, phi, psi


def random_gaussian_model(rng: np.random.Generator):
    """Small random affine-Gaussian model; sets live on-grid (tails outside)."""
    from pctlmc import AffineGaussianKernel

    slope = rng.uniform(0.3, 1.1)
    intercept = rng.uniform(-1.0, 1.0)
    spread = rng.uniform(0.4, 2.0)
    kernel = AffineGaussianKernel(lambda x: slope * x + intercept, lambda x: spread + 0.0 * x)
    grid = Grid(0.0, 10.0, 40)
    model = Model(kernel, grid, {})
    centers = grid.centers
    cut_lo, cut_hi = sorted(rng.uniform(1.0, 9.0, size=2))
    psi = SatSet((centers >= cut_hi))
    phi = SatSet((centers >= cut_lo) & (centers < cut_hi))
    return model, phi, psi


def random_member(rng: np.random.Generator, phi: SatSet, psi: SatSet) -> ValueFunction:
    """Random element of the operator's invariant set: 1 on psi, 0 outside phi u psi."""
    w = rng.random(phi.mask.size)
    w[psi.mask] = 1.0
    w[~(phi.mask | psi.mask)] = 0.0
    return ValueFunction(w,
                         1.0 if psi.lower_tail else 0.0,
                         1.0 if psi.upper_tail else 0.0)


# ---------------------------------------------------------------------------
# Oracles
# ---------------------------------------------------------------------------

def normal_cdf(x: float, mean: float = 0.0, std: float = 1.0) -> float:
    """Standard-library normal distribution function (erf-based)."""
    return 0.5 * (1.0 + math.erf((x - mean) / (std * math.sqrt(2.0))))


def enum_until_values(P, phi_states: set[int], psi_states: set[int], k: int) -> np.ndarray:
    """Bounded-until probabilities by exhaustive path enumeration.

    Row i holds the i-step values for every start state: the probability of
    some path of length at most i whose interior stays in phi minus psi and
    whose endpoint lands in psi (1 on psi, 0 outside phi and psi).
    """
    P = [list(map(float, row)) for row in P]
    n = len(P)
    trans = {s for s in phi_states if s not in psi_states}
    out = np.zeros((k + 1, n))
    for x in range(n):
        if x in psi_states:
            out[:, x] = 1.0
            continue
        if x not in trans:
            continue
        for i in range(1, k + 1):
            total = 0.0
            for path in itertools.product(range(n), repeat=i):
                if path[-1] not in psi_states:
                    continue
                if any(s not in trans for s in path[:-1]):
                    continue
                pr = P[x][path[0]]
                for a, b in zip(path, path[1:]):
                    pr *= P[a][b]
                total += pr
            out[i, x] = out[i - 1, x] + total
    return out


def linear_until_values(P, phi_states: set[int], psi_states: set[int]) -> np.ndarray:
    """Unbounded-until probabilities by a direct linear solve on the transient block."""
    P = np.asarray(P, dtype=float)
    n = P.shape[0]
    v = np.zeros(n)
    psi_list = sorted(psi_states)
    v[psi_list] = 1.0
    trans = sorted(s for s in phi_states if s not in psi_states)
    if trans:
        Ptt = P[np.ix_(trans, trans)]
        into_psi = P[np.ix_(trans, psi_list)].sum(axis=1) if psi_list else np.zeros(len(trans))
        v[trans] = np.linalg.solve(np.eye(len(trans)) - Ptt, into_psi)
    return v
