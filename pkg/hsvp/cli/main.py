"""Command-line entry point: solve, check, gen and bench.

Exit codes: 0 success, 1 solvers disagree in ``check``, 2 input or
validation error, 3 a size guard refused the computation.
"""

import argparse
import contextlib
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, TextIO

import yaml
from pydantic import ValidationError

from hsvp import __version__
from hsvp.cli.bench import render_csv, render_table, run_bench
from hsvp.cli.io import (
    attach_conds,
    read_conds,
    read_hierarchy,
    read_probs,
    write_hierarchy,
    write_probs,
)
from hsvp.cli.runner import BatchRunner
from hsvp.config.models import HsvpConfig
from hsvp.config.settings import configure, get_config, setup_logging
from hsvp.core.errors import HsvpException, TooLargeException
from hsvp.core.generate import generate_dataset
from hsvp.core.hierarchy import Hierarchy
from hsvp.core.prob import ProblemInstance
from hsvp.models import SOLVER_NAMES, GenConfig, Prediction, RunConfig
from hsvp.observability.metrics import setup_metrics, write_metrics
from hsvp.observability.tracing import setup_tracing
from hsvp.solvers.base import BaseSolver
from hsvp.solvers.registry import solver_registry

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DISAGREEMENT = 1
EXIT_INPUT_ERROR = 2
EXIT_TOO_LARGE = 3

HIERARCHY_FILE = "hierarchy.tsv"
PROBS_FILE = "probs.csv"

DEFAULT_BENCH_SOLVERS = "mvm,kcg,rts"


def _int_list(value: str) -> List[int]:
    try:
        return [int(part) for part in value.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {value!r}")


def _name_list(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]


def _add_input_arguments(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--hierarchy", type=Path, required=required, help="Hierarchy file")
    parser.add_argument("--probs", type=Path, help="Flat probability CSV")
    parser.add_argument("--conds", type=Path, help="Hierarchical conditionals file")


def _add_budget_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--r", type=_int_list, default=[1], help="Complexity budgets, e.g. 1,2")
    parser.add_argument("--k", type=_int_list, default=[1], help="Size budgets, e.g. 1,3,5")


def _add_gen_arguments(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--classes", type=int, required=required, help="Number of classes K")
    parser.add_argument("--branching", type=float, default=2.0, help="Mean branching factor")
    parser.add_argument("--shape", choices=["random", "balanced"], default="random")
    parser.add_argument("--alpha", type=float, default=1.0, help="Dirichlet concentration")
    parser.add_argument("--instances", type=int, default=10, help="Number of rows")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per operation."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: HSVP_CONFIG or hsvp.yaml)")
    common.add_argument("--seed", type=int, default=0, help="Random seed")
    common.add_argument("--workers", type=int, help="Worker threads (default: runner.workers)")
    common.add_argument("--out", type=Path, help="Output file (default: stdout)")
    common.add_argument(
        "--no-timing", action="store_true", help="Report time_us as 0 for reproducible output"
    )
    common.add_argument("--metrics-out", type=Path, help="Write Prometheus metrics here")

    parser = argparse.ArgumentParser(
        prog="hsvp", description="Budget-constrained set-valued prediction over class hierarchies"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", parents=[common], help="Solve every instance")
    _add_input_arguments(solve, required=True)
    _add_budget_arguments(solve)
    solve.add_argument("--solver", choices=SOLVER_NAMES, default="rts")
    solve.set_defaults(handler=cmd_solve)

    check = commands.add_parser("check", parents=[common], help="Cross-check solver masses")
    _add_input_arguments(check, required=True)
    _add_budget_arguments(check)
    check.add_argument(
        "--solver-set", type=_name_list, default=list(SOLVER_NAMES), help="Solvers to compare"
    )
    check.set_defaults(handler=cmd_check)

    gen = commands.add_parser("gen", parents=[common], help="Generate a synthetic dataset")
    _add_gen_arguments(gen, required=True)
    gen.add_argument("--out-dir", type=Path, required=True, help="Output directory")
    gen.set_defaults(handler=cmd_gen)

    bench = commands.add_parser("bench", parents=[common], help="Benchmark a solver grid")
    _add_input_arguments(bench, required=False)
    _add_budget_arguments(bench)
    _add_gen_arguments(bench, required=False)
    bench.add_argument(
        "--solvers", type=_name_list, default=_name_list(DEFAULT_BENCH_SOLVERS)
    )
    bench.set_defaults(handler=cmd_bench)
    return parser


def _gen_config(args: argparse.Namespace, out_dir: Optional[Path] = None) -> GenConfig:
    return GenConfig(
        classes=args.classes,
        branching=args.branching,
        shape=args.shape,
        alpha=args.alpha,
        instances=args.instances,
        seed=args.seed,
        out_dir=out_dir,
    )


def _run_config(args: argparse.Namespace, config: HsvpConfig) -> RunConfig:
    solvers = getattr(args, "solver_set", None) or getattr(args, "solvers", None)
    gen = None
    if getattr(args, "classes", None) is not None:
        gen = _gen_config(args)
    fields = dict(
        solver=getattr(args, "solver", "rts"),
        r=args.r,
        k=args.k,
        seed=args.seed,
        hierarchy=args.hierarchy,
        probs=args.probs,
        conds=args.conds,
        out=args.out,
        workers=args.workers if args.workers is not None else config.runner.workers,
        timing=not args.no_timing,
        gen=gen,
    )
    if solvers is not None:
        fields["solvers"] = solvers
    return RunConfig(**fields)


def _load_instances(config: RunConfig, h: Hierarchy) -> List[ProblemInstance]:
    if not config.has_input():
        raise ValueError("one of --probs or --conds is required")
    if config.probs is None:
        return read_conds(config.conds, h)
    instances = read_probs(config.probs, h)
    if config.conds is not None:
        instances = attach_conds(instances, read_conds(config.conds, h), config.conds)
    return instances


@contextlib.contextmanager
def _output(path: Optional[Path]):
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        yield f


def _write_record(stream: TextIO, record: Dict[str, object]) -> None:
    stream.write(json.dumps(record, separators=(",", ":")) + "\n")


def cmd_solve(args: argparse.Namespace, config: HsvpConfig) -> int:
    """Solve every instance at every budget pair and write JSON Lines."""
    run = _run_config(args, config)
    h = read_hierarchy(run.hierarchy)
    instances = _load_instances(run, h)
    runner = BatchRunner(solver_registry.create(run.solver, h, config.solver), run.workers)

    with _output(run.out) as stream:
        for b in run.budgets():
            for inst, prediction in zip(instances, runner.run(instances, b)):
                _write_record(stream, prediction.to_record(inst.instance_id, run.timing))
    return EXIT_OK


def _create_solvers(names: Sequence[str], h: Hierarchy, config: HsvpConfig) -> Dict[str, BaseSolver]:
    unknown = [name for name in names if solver_registry.get(name) is None]
    if unknown:
        raise ValueError(f"Unknown solvers {unknown}; available: {solver_registry.list()}")
    return {name: solver_registry.create(name, h, config.solver) for name in names}


def cmd_check(args: argparse.Namespace, config: HsvpConfig) -> int:
    """Run all applicable solvers and compare their masses per instance."""
    run = _run_config(args, config)
    h = read_hierarchy(run.hierarchy)
    instances = _load_instances(run, h)
    solvers = _create_solvers(run.solvers, h, config)
    tolerance = config.solver.agreement_tolerance

    compared = 0
    for b in run.budgets():
        results: Dict[str, List[Prediction]] = {}
        for name, solver in solvers.items():
            try:
                results[name] = BatchRunner(solver, run.workers).run(instances, b)
            except TooLargeException as e:
                logger.warning(f"Skipping {name} at {b}: {e}")
        if len(results) < 2:
            logger.warning(f"Fewer than two applicable solvers at {b}, nothing to compare")
            continue

        for i, inst in enumerate(instances):
            masses = {name: preds[i].mass for name, preds in results.items()}
            if max(masses.values()) - min(masses.values()) > tolerance:
                _write_record(
                    sys.stdout,
                    {
                        "instance_id": inst.instance_id,
                        "r": b.r,
                        "k": b.k,
                        "masses": masses,
                        "sets": {name: preds[i].sorted_classes() for name, preds in results.items()},
                    },
                )
                logger.error(f"Solvers disagree on instance {inst.instance_id} at {b}")
                return EXIT_DISAGREEMENT
        compared += 1
        logger.info(f"{', '.join(results)} agree on {len(instances)} instances at {b}")

    if compared == 0:
        logger.warning("No budget pair had two applicable solvers")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace, config: HsvpConfig) -> int:
    """Write a seeded hierarchy and probability CSV to the output directory."""
    gen = _gen_config(args, out_dir=args.out_dir)
    h, instances = generate_dataset(gen)
    gen.out_dir.mkdir(parents=True, exist_ok=True)
    write_hierarchy(gen.out_dir / HIERARCHY_FILE, h)
    write_probs(gen.out_dir / PROBS_FILE, instances, h.class_count)
    logger.info(f"Wrote {HIERARCHY_FILE} and {PROBS_FILE} to {gen.out_dir}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, config: HsvpConfig) -> int:
    """Benchmark the solver grid and report CSV plus an aligned table."""
    run = _run_config(args, config)
    if run.hierarchy is not None:
        h = read_hierarchy(run.hierarchy)
        instances = _load_instances(run, h)
    elif run.gen is not None:
        h, instances = generate_dataset(run.gen)
    else:
        raise ValueError("bench needs --hierarchy with --probs/--conds, or --classes")
    _create_solvers(run.solvers, h, config)

    cells = run_bench(
        h,
        instances,
        run.solvers,
        run.budgets(),
        warmup=config.runner.warmup,
        workers=run.workers,
        timing=run.timing,
        config=config.solver,
    )
    with _output(run.out) as stream:
        stream.write(render_csv(cells))
    sys.stderr.write(render_table(cells))
    return EXIT_OK


def _dispatch(
    handler: Callable[[argparse.Namespace, HsvpConfig], int],
    args: argparse.Namespace,
    config: HsvpConfig,
) -> int:
    try:
        return handler(args, config)
    except TooLargeException as e:
        logger.error(f"Size guard: {e}")
        return EXIT_TOO_LARGE
    except (HsvpException, ValidationError, ValueError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_ERROR


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        configure(args.config)
    except (yaml.YAMLError, ValidationError, OSError) as e:
        print(f"hsvp: invalid configuration: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    config = get_config()
    setup_logging()
    setup_metrics(config.metrics.enabled)
    setup_tracing(config.tracing)

    try:
        return _dispatch(args.handler, args, config)
    finally:
        if args.metrics_out is not None:
            write_metrics(args.metrics_out)


if __name__ == "__main__":
    sys.exit(main())
