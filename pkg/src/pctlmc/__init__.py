"""PCTL model checking over finite and continuous one-dimensional Markov chains."""

__version__ = "0.1.0"

from .formula import (
    And,
    Atom,
    BoundedEventually,
    BoundedUntil,
    Eventually,
    FalseFormula,
    FormulaSyntaxError,
    Implies,
    Next,
    Not,
    Or,
    PathFormula,
    Prob,
    StateFormula,
    TrueFormula,
    Until,
    atom_names,
    desugar,
    parse,
    pretty,
)
from .kernel import (
    AffineGaussianKernel,
    DiscretizedKernel,
    FiniteKernel,
    Grid,
    Kernel,
    KernelError,
    Region,
    discretize,
    mass,
)
from .checker import (
    FixpointReport,
    Model,
    NonConvergenceError,
    SatSet,
    TailCoverageError,
    UnboundAtomError,
    ValueFunction,
    apply_L,
    bounded_until,
    check,
    contraction_factor,
    next_values,
    path_probabilities,
    simulate_until,
    threshold_set,
    unbounded_until,
)
from .case_studies import (
    CATCH_MSY,
    PortfolioStrategy,
    fishery_model,
    retirement_model,
)
from .runconfig import ConfigError, RunConfig, build_model, load_config
from .runner import CheckResult, SimulationResult, run_check, run_simulation

__all__ = [
    "__version__",
    # formula
    "And", "Atom", "BoundedEventually", "BoundedUntil", "Eventually",
    "FalseFormula", "FormulaSyntaxError", "Implies", "Next", "Not", "Or",
    "PathFormula", "Prob", "StateFormula", "TrueFormula", "Until",
    "atom_names", "desugar", "parse", "pretty",
    # kernel
    "AffineGaussianKernel", "DiscretizedKernel", "FiniteKernel", "Grid",
    "Kernel", "KernelError", "Region", "discretize", "mass",
    # checker
    "FixpointReport", "Model", "NonConvergenceError", "SatSet",
    "TailCoverageError", "UnboundAtomError", "ValueFunction", "apply_L",
    "bounded_until", "check", "contraction_factor", "next_values",
    "path_probabilities", "simulate_until", "threshold_set", "unbounded_until",
    # case studies
    "CATCH_MSY", "PortfolioStrategy", "fishery_model", "retirement_model",
    # config / runner
    "ConfigError", "RunConfig", "build_model", "load_config",
    "CheckResult", "SimulationResult", "run_check", "run_simulation",
]
