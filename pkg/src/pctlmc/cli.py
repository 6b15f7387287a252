"""Command-line client for the checker.

Thin wrapper over the same runner the HTTP service uses::

    pctlmc check --config cfg.json --formula "P>=0.9[ safe U<=5 target ]" \\
                 --out values.csv --report report.json
    pctlmc simulate --config cfg.json --x0 100 --n 100000 --horizon 5 --seed 7
    pctlmc serve --host 127.0.0.1 --port 8000

Exit codes: 0 success, 2 configuration error, 3 formula syntax error,
4 unbound atom, 5 non-convergence.  Diagnostics go to stderr only; output
files are written only when there is a result to write.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checker import UnboundAtomError
from .formula import FormulaSyntaxError, parse
from .runconfig import ConfigError, load_config
from .runner import CheckResult, run_check, run_simulation

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FORMULA = 3
EXIT_UNBOUND_ATOM = 4
EXIT_NON_CONVERGENCE = 5


def _fail(message: str, code: int) -> int:
    print(f"pctlmc: error: {message}", file=sys.stderr)
    return code


def _write_csv(path: Path, result: CheckResult) -> None:
    lines = ["cell_index,cell_center,value,satisfied"]
    for i, (center, value, sat) in enumerate(zip(result.cell_centers, result.values, result.satisfied)):
        lines.append(f"{i},{center:.12g},{value:.12g},{int(sat)}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _write_report(path: Path, result: CheckResult, config_echo: dict,
                  tol: float, max_iter: int) -> None:
    report = {
        "formula": result.formula,
        "desugared": result.desugared,
        "config": config_echo,
        "solver": {"tol": tol, "max_iter": max_iter},
        "grid": result.grid.model_dump(),
        "satisfaction": result.satisfaction.model_dump() if result.satisfaction else None,
        "evaluations": [e.model_dump() for e in result.evaluations],
        "converged": result.converged,
    }
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _cmd_check(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        return _fail(str(e), EXIT_CONFIG)
    try:
        parse(args.formula)
    except FormulaSyntaxError as e:
        return _fail(str(e), EXIT_FORMULA)

    tol = args.tol if args.tol is not None else cfg.solver.tol
    max_iter = args.max_iter if args.max_iter is not None else cfg.solver.max_iter
    try:
        result = run_check(cfg, args.formula, tol=tol, max_iter=max_iter)
    except ConfigError as e:
        return _fail(str(e), EXIT_CONFIG)
    except UnboundAtomError as e:
        return _fail(str(e), EXIT_UNBOUND_ATOM)

    config_echo = cfg.model_dump(mode="json")
    _write_report(Path(args.report), result, config_echo, tol, max_iter)
    if not result.converged:
        return _fail("unbounded until did not converge; report written, CSV skipped",
                     EXIT_NON_CONVERGENCE)
    _write_csv(Path(args.out), result)
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    try:
        cfg = load_config(args.config)
        if args.x0 is not None:
            starts = [args.x0]
        elif cfg.simulation and cfg.simulation.x0:
            starts = cfg.simulation.x0
        else:
            return _fail("no start state: pass --x0 or list x0 in the config's simulation block",
                         EXIT_CONFIG)
        results = [run_simulation(cfg, x0, args.n, args.horizon, args.seed,
                                  phi=args.phi, psi=args.psi) for x0 in starts]
    except ConfigError as e:
        return _fail(str(e), EXIT_CONFIG)
    for result in results:
        print(json.dumps(result.model_dump(), sort_keys=True))
    return EXIT_OK


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pctlmc",
        description="PCTL model checking for finite and continuous one-dimensional Markov chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="evaluate a formula and write CSV + report")
    p_check.add_argument("--config", required=True, help="JSON run configuration")
    p_check.add_argument("--formula", required=True, help="PCTL formula text")
    p_check.add_argument("--out", required=True, help="per-cell CSV output path")
    p_check.add_argument("--report", required=True, help="JSON report output path")
    p_check.add_argument("--tol", type=float, default=None, help="fixed-point tolerance override")
    p_check.add_argument("--max-iter", type=int, default=None, help="iteration cap override")
    p_check.set_defaults(func=_cmd_check)

    p_sim = sub.add_parser("simulate", help="Monte Carlo until estimate from one state")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--x0", type=float, default=None,
                       help="start state (default: the config's simulation x0 list)")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--horizon", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--phi", default=None, help="safe-region name (default from config)")
    p_sim.add_argument("--psi", default=None, help="target-region name (default from config)")
    p_sim.set_defaults(func=_cmd_simulate)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
