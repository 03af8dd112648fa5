"""
Command-line interface for pysoac.

Usage:
    pysoac solve MODEL.mps [--time-limit S] [--replicas K] [--out FILE.sol] ...
    pysoac check MODEL.mps SOLUTION.sol [--tol E]
    pysoac oracle MODEL.mps [--max-vars N]
    pysoac gap --best X --lb Y

Exit codes: 0 success / feasible, 1 no feasible solution / infeasible,
2 input error.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.logging import RichHandler

from .errors import PysoacError
from .mps_io import read_mps_file, read_sol_file, write_sol
from .report import format_gap, format_key_values, format_report, format_verdict, history_table, report_to_json
from .solver import SolverConfig, default_params_grid, solve
from .verify import DEFAULT_MAX_VARS, brute_force, check_solution_file, gap, gap_uses_absolute_denominator

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO_SOLUTION = 1
EXIT_INPUT_ERROR = 2


def configure_logging(level: int = logging.INFO):
    """Route pysoac logging through a rich handler on stderr"""
    root = logging.getLogger("pysoac")
    root.handlers.clear()
    handler = RichHandler(console=Console(stderr=True), show_path=False, markup=False)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False


class SolverCLI:
    """Dispatches the solve / check / oracle / gap commands"""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console(highlight=False)

    def echo(self, text: str = ""):
        self.console.print(text, markup=False, highlight=False, soft_wrap=True)

    def build_parser(self) -> argparse.ArgumentParser:
        formatter = argparse.ArgumentDefaultsHelpFormatter
        parser = argparse.ArgumentParser(
            prog="pysoac",
            description="Anytime 0-1 ILP solver simulating a self-organizing algebraic circuit.",
            formatter_class=formatter,
        )
        parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
        parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
        sub = parser.add_subparsers(dest="command", required=True)

        p = sub.add_parser("solve", help="solve an MPS model", formatter_class=formatter)
        p.add_argument("model_path", help="MPS model file (.mps or .mps.gz)")
        p.add_argument("--time-limit", type=float, default=300.0, help="wall-clock time out in seconds")
        p.add_argument("--replicas", type=int, default=1, help="number of replicas")
        p.add_argument("--jobs", type=int, default=1, help="parallel worker processes for replicas")
        p.add_argument("--seed", type=int, default=0, help="base seed; replica k uses seed + k")
        p.add_argument("--dt", type=float, default=None, help="integration step for every replica (default: per-replica grid)")
        p.add_argument("--threshold", type=float, default=0.0, help="readout voltage threshold")
        p.add_argument("--tol", type=float, default=1e-6, help="feasibility tolerance")
        p.add_argument("--readout-stride", type=int, default=10, help="integration steps between readouts")
        p.add_argument("--lb", type=float, default=None, help="external lower bound O_lb (e.g. an LP bound)")
        p.add_argument("--steps", type=int, default=None, help="deterministic mode: run exactly this many steps per replica")
        p.add_argument("--trace", default=None, help="write a trajectory CSV of replica 0 to this path")
        p.add_argument("--trace-stride", type=int, default=100, help="steps between trace rows")
        p.add_argument("--out", default=None, help="solution file (default: <model name>.sol)")
        p.add_argument("--report", default=None, help="write the JSON report to this path")
        p.add_argument("--checkpoint", type=float, action="append", default=[],
                       help="also report the best objective found by this time (repeatable)")

        p = sub.add_parser("check", help="verify a .sol file against a model", formatter_class=formatter)
        p.add_argument("model_path", help="MPS model file")
        p.add_argument("sol_path", help=".sol solution file")
        p.add_argument("--tol", type=float, default=1e-6, help="feasibility tolerance")
        p.add_argument("--lb", type=float, default=None, help="lower bound for gap reporting")

        p = sub.add_parser("oracle", help="brute-force optimum of a small model", formatter_class=formatter)
        p.add_argument("model_path", help="MPS model file")
        p.add_argument("--max-vars", type=int, default=DEFAULT_MAX_VARS, help="refuse models with more variables")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers for the enumeration")

        p = sub.add_parser("gap", help="optimality gap (O_best - O_lb) / |O_best|", formatter_class=formatter)
        p.add_argument("--best", type=float, required=True, help="best objective O_best")
        p.add_argument("--lb", type=float, required=True, help="lower bound O_lb")
        return parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        parser = self.build_parser()
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return EXIT_OK if exc.code == 0 else EXIT_INPUT_ERROR

        level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
        configure_logging(level)
        command = {
            "solve": self.cmd_solve,
            "check": self.cmd_check,
            "oracle": self.cmd_oracle,
            "gap": self.cmd_gap,
        }[args.command]
        try:
            return command(args)
        except (PysoacError, OSError) as exc:
            logger.error("%s", exc)
            self.echo(f"error: {exc}")
            return EXIT_INPUT_ERROR

    def _config(self, args) -> SolverConfig:
        grid = default_params_grid()
        overrides = {"threshold": args.threshold}
        if args.dt is not None:
            overrides["dt"] = args.dt
        grid = tuple(replace(p, **overrides) for p in grid)
        return SolverConfig(
            time_limit_seconds=args.time_limit,
            n_replicas=args.replicas,
            base_seed=args.seed,
            params_grid=grid,
            readout_stride=args.readout_stride,
            step_limit=args.steps,
            feasibility_tol=args.tol,
            n_jobs=args.jobs,
            lower_bound=args.lb,
            trace_stride=args.trace_stride if args.trace else 0,
        )

    def cmd_solve(self, args) -> int:
        model = read_mps_file(args.model_path)
        config = self._config(args)
        stats = model.stats()
        self.echo(format_key_values([(k, v) for k, v in stats.items()]))
        logger.info("solving '%s' with %d replica(s)", model.name, config.n_replicas)

        report = solve(model, config)
        self.echo(format_report(report, args.checkpoint))
        if report.merged_history():
            self.console.print(history_table(report))

        if args.trace:
            tracer = report.per_replica[0].tracer
            if tracer is not None:
                tracer.save(args.trace)
        if args.report:
            Path(args.report).write_text(report_to_json(report, config.to_dict()) + "\n")

        if report.best is None:
            return EXIT_NO_SOLUTION
        out = args.out or f"{model.name}.sol"
        Path(out).write_text(write_sol(report.best, model.var_names))
        self.echo(f"solution written to {out}")
        return EXIT_OK

    def cmd_check(self, args) -> int:
        model = read_mps_file(args.model_path)
        sol = read_sol_file(args.sol_path)
        verdict = check_solution_file(model, sol, args.tol, lower_bound=args.lb)
        self.echo(format_verdict(verdict))
        return EXIT_OK if verdict.feasible else EXIT_NO_SOLUTION

    def cmd_oracle(self, args) -> int:
        model = read_mps_file(args.model_path)
        result = brute_force(model, args.max_vars, n_jobs=args.jobs)
        if result.optimum is None:
            self.echo("infeasible")
            return EXIT_NO_SOLUTION
        self.echo(format_key_values([
            ("optimum", result.optimum),
            ("feasible_count", result.feasible_count),
            ("enumerated", result.enumerated),
        ]))
        return EXIT_OK

    def cmd_gap(self, args) -> int:
        value = gap(args.best, args.lb)
        self.echo(format_gap(value))
        if gap_uses_absolute_denominator(args.best):
            self.echo("note: negative objective, |O_best| used as denominator")
        return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for CLI"""
    return SolverCLI().run(argv)


if __name__ == "__main__":
    sys.exit(main())
