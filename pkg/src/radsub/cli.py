"""Command-line front end.

::

    radsub solve  --problem <path|catalog:name> --algo {A,B,1,2} [--epsilon r] [--zstar r]
                  [--max-iters n] [--trace path] [--seed n]
    radsub verify --problem <path|catalog:name> --suite {identities,bounds,equivalence} [--seed n]

Exit codes: 0 success, 1 a verification check failed, 2 solver error,
64 usage error, 65 invalid problem data, 66 problem file not readable.
"""

from __future__ import annotations

import argparse
import math
import sys
import time

from . import __version__
from .checks import SUITES
from .conic import algorithm1, algorithm2
from .convex import algorithm_a, algorithm_b
from .errors import InvalidProblem, SolverError
from .problem_io import RunSummary, resolve
from .report import SolverConfig, write_trace_csv
from .verify import DEFAULT_SEED

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_SOLVER = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: usage error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="radsub", description="Radial-projection supgradient solvers.")
    parser.add_argument("--version", action="version", version=f"radsub {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    solve = sub.add_parser("solve", help="run one of Algorithms A, B, 1, 2")
    solve.add_argument("--problem", required=True, help="problem file path, lp:<path> or catalog:<name>")
    solve.add_argument("--algo", required=True, choices=["A", "B", "1", "2"])
    solve.add_argument("--epsilon", type=float, help="target relative gap for A and 2, in (0, 1)")
    solve.add_argument("--zstar", type=float, help="optimal value for B and 1 (defaults to the known value)")
    solve.add_argument("--max-iters", type=int, default=1000)
    solve.add_argument("--trace", help="write the iterate trace as CSV")
    solve.add_argument("--seed", type=int, default=DEFAULT_SEED)
    solve.set_defaults(func=cmd_solve)

    verify = sub.add_parser("verify", help="run an invariant suite")
    verify.add_argument("--problem", required=True)
    verify.add_argument("--suite", required=True, choices=sorted(SUITES))
    verify.add_argument("--seed", type=int, default=DEFAULT_SEED)
    verify.set_defaults(func=cmd_verify)
    return parser


def _error(msg):
    print(f"radsub: {msg}", file=sys.stderr)


def _load(spec):
    """Resolve a problem or return the exit code explaining why not."""
    try:
        return resolve(spec), None
    except OSError as exc:
        _error(f"cannot read problem file: {exc}")
        return None, EXIT_NOINPUT
    except (InvalidProblem, KeyError, ValueError) as exc:
        _error(f"invalid problem: {exc}")
        return None, EXIT_DATA
    except SolverError as exc:
        _error(f"problem setup failed: {type(exc).__name__}: {exc}")
        return None, EXIT_DATA


def _validate_solve_args(args, prob):
    if args.max_iters < 1:
        raise UsageError("--max-iters must be >= 1")
    if args.algo in ("A", "2"):
        if args.epsilon is None:
            raise UsageError(f"--algo {args.algo} requires --epsilon")
        if not 0.0 < args.epsilon < 1.0:
            raise UsageError("--epsilon must lie in (0, 1)")
    if args.algo in ("B", "1"):
        zstar = args.zstar if args.zstar is not None else prob.z_star
        if zstar is None:
            raise UsageError(f"--algo {args.algo} requires --zstar (optimal value unknown)")
        if not math.isfinite(zstar):
            raise UsageError("--zstar must be finite")


def _run(args, prob, cfg):
    zstar = args.zstar if args.zstar is not None else prob.z_star
    if args.algo == "A":
        convex = prob.convex
        if args.zstar is not None:
            convex.f_star = args.zstar
        return algorithm_a(convex, args.epsilon, cfg), convex.f_star
    if args.algo == "B":
        return algorithm_b(prob.convex, zstar, cfg), zstar
    if args.algo == "1":
        return algorithm1(prob.conic, zstar, prob.x_bar, cfg), zstar
    return algorithm2(prob.conic, args.epsilon, prob.x_bar, cfg, z_star=zstar), zstar


def cmd_solve(args) -> int:
    prob, code = _load(args.problem)
    if prob is None:
        return code
    try:
        _validate_solve_args(args, prob)
    except UsageError as exc:
        _error(f"usage error: {exc}")
        return EXIT_USAGE
    cfg = SolverConfig(max_iterations=args.max_iters, keep_points=False)
    start = time.perf_counter()
    try:
        report, zstar = _run(args, prob, cfg)
    except SolverError as exc:
        _error(f"solver error: {type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    elapsed = time.perf_counter() - start
    if args.trace:
        try:
            write_trace_csv(report, args.trace)
        except OSError as exc:
            _error(f"cannot write trace: {exc}")
            return EXIT_NOINPUT
    summary = RunSummary(
        problem=prob.name, algorithm=args.algo, termination=report.termination,
        iterations=report.iterations, best_objective=report.best_objective,
        best_gap=report.best_gap if zstar is not None else None,
        best_point=None if report.best_point is None else report.best_point.tolist(),
        wall_time_s=elapsed, epsilon=args.epsilon if args.algo in ("A", "2") else None,
        z_star=zstar, seed=args.seed, geometry=None,
        tolerances=dict(report.tolerances, max_iterations=cfg.max_iterations,
                        optimality_tol=cfg.optimality_tol),
    )
    print(summary.to_json())
    return EXIT_OK


def cmd_verify(args) -> int:
    prob, code = _load(args.problem)
    if prob is None:
        return code
    try:
        results = SUITES[args.suite](prob, seed=args.seed)
    except SolverError as exc:
        _error(f"solver error: {type(exc).__name__}: {exc}")
        return EXIT_SOLVER
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
