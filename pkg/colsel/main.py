import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

from pydantic import ValidationError

from . import __version__
from .algorithms.bench import SUITES, run_suite
from .algorithms.dist import DistConfig, dist_greedy_epochs
from .algorithms.matcore import ColumnMatrix, frobenius_sq, load_matrix
from .algorithms.objective import coverage_of
from .algorithms.oracle import brute_force_opt, pca_upper_bound
from .algorithms.report import OracleSummary, RunConfig, RunReport, SuiteReport, Timings, load_config_file
from .algorithms.select import LazierParams, evaluate_exact, greedy, lazier_greedy, random_baseline
from .algorithms.sketch import SketchSpec, column_sample, gaussian_rows, pcps_cols, recommend_dims
from .config import get_settings
from .errors import ColselError, DimensionMismatchError, GuardExceededError

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

logger = logging.getLogger(__name__)

# flag dest -> RunConfig field, where the names differ
FLAG_FIELDS = {
    "matrix": "matrix_path",
    "candidates": "candidates_path",
    "out": "output_path",
}


def _dim(value: str):
    """Sketch dimension flag: a positive integer or 'auto'."""
    if value == "auto":
        return value
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or 'auto', got {value!r}") from None


def create_parser() -> argparse.ArgumentParser:
    """Create and configure the argument parser."""
    parser = argparse.ArgumentParser(
        prog="colsel",
        description="Greedy column subset selection: single machine, distributed and sketched",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  colsel select --matrix A.csv --k 2 --out report.json
  colsel select --matrix A.mtx --method dist --machines 4 --k 5 --epochs 3 --out dist.json
  colsel bench --suite tight-example --out tight.json
  colsel schema
""",
    )
    parser.add_argument("--version", action="version", version=f"colsel {__version__}")
    sub_parsers = parser.add_subparsers(dest="command", required=True)

    # select命令: only flags given explicitly end up in the namespace
    select_parser = sub_parsers.add_parser(
        "select", help="Run one selector and write a report", argument_default=argparse.SUPPRESS)
    select_parser.add_argument("--config", type=Path, help="JSON config (or a previous report) to start from")
    select_parser.add_argument("--matrix", type=Path, help="Target matrix A (.csv or .mtx)")
    select_parser.add_argument("--candidates", type=Path, help="Candidate matrix B (defaults to A)")
    select_parser.add_argument("--method", choices=["greedy", "lazier", "dist", "random"], help="Selector (default: greedy)")
    select_parser.add_argument("--k", type=int, help="Benchmark size k")
    select_parser.add_argument("--r", type=int, help="Number of columns to select (default: k)")
    select_parser.add_argument("--delta", type=float, help="Lazier sampling failure probability")
    select_parser.add_argument("--machines", type=int, help="Number of machines for dist")
    select_parser.add_argument("--k-prime", type=int, help="Per-machine budget for dist")
    select_parser.add_argument("--k-dprime", type=int, help="Aggregation budget for dist")
    select_parser.add_argument("--epochs", type=int, help="Number of dist epochs (default: 1)")
    select_parser.add_argument("--sigma-estimate", type=float, help="Derive k' and k'' from a sigma_min estimate")
    select_parser.add_argument("--sketch-rows", type=_dim, help="Gaussian row sketch dimension d, or 'auto'")
    select_parser.add_argument("--pcps-cols", type=_dim, help="PCPS column sketch dimension n', or 'auto'")
    select_parser.add_argument("--sample-cols", type=_dim, help="Uniform column sample size, or 'auto'")
    select_parser.add_argument("--epsilon", type=float, help="Sketch accuracy (default: 0.5)")
    select_parser.add_argument("--sketch-delta", type=float, help="Sketch failure probability (default: 0.1)")
    select_parser.add_argument("--seed", type=int, help="Master seed (default: 0)")
    select_parser.add_argument("--workers", type=int, help="Thread count for dist machines")
    select_parser.add_argument("--oracle", action="store_true", help="Add brute-force OPT_k and the PCA bound")
    select_parser.add_argument("--out", type=Path, help="Report path")

    # bench命令
    bench_parser = sub_parsers.add_parser("bench", help="Run an acceptance suite")
    bench_parser.add_argument("--suite", required=True, help=f"One of: {', '.join(SUITES)}")
    bench_parser.add_argument("--seed", type=int, default=0, help="Master seed (default: 0)")
    bench_parser.add_argument("--trials", type=int, help="Override the suite's trial count")
    bench_parser.add_argument("--out", type=Path, help="Suite report path")

    # schema命令
    sub_parsers.add_parser("schema", help="Print the JSON schema of select reports")

    for command_parser in (select_parser, bench_parser):
        command_parser.add_argument("--verbose", "-v", action="store_true", default=False, help="Enable verbose mode")
        command_parser.add_argument("--quiet", action="store_true", default=False,
                                    help="Suppress logging and progress bars")
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge an optional config file with the flags given on the command line; flags win."""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None) is not None:
        values.update(load_config_file(args.config))
    for dest, value in vars(args).items():
        if dest in ("command", "config", "verbose", "quiet"):
            continue
        values[FLAG_FIELDS.get(dest, dest)] = value
    return RunConfig.model_validate(values)


def _resolve_dim(value, auto: int) -> Optional[int]:
    if value is None:
        return None
    return auto if value == "auto" else int(value)


def _sketch_target(config: RunConfig, a: ColumnMatrix, b: ColumnMatrix) -> Tuple[ColumnMatrix, ColumnMatrix, List[Dict]]:
    """Apply the configured sketches to the instance selection runs on."""
    d_auto, n_auto = recommend_dims(config.budget, b.cols, config.epsilon, config.sketch_delta)
    applied = []
    rows = _resolve_dim(config.sketch_rows, d_auto)
    if rows is not None:
        spec = SketchSpec("gaussian-rows", rows, config.epsilon, config.sketch_delta, config.seed)
        pair = gaussian_rows(a, b, spec)
        a, b = pair.a_sketched, pair.b_sketched
        applied.append(spec.to_dict())
    cols = _resolve_dim(config.pcps_cols, n_auto)
    if cols is not None:
        spec = SketchSpec("pcps-cols", cols, config.epsilon, config.sketch_delta, config.seed)
        a = pcps_cols(a, spec).a_sketched
        applied.append(spec.to_dict())
    sample = _resolve_dim(config.sample_cols, n_auto)
    if sample is not None:
        spec = SketchSpec("column-sample", sample, config.epsilon, config.sketch_delta, config.seed)
        a = column_sample(a, spec).a_sketched
        applied.append(spec.to_dict())
    return a, b, applied


def _dist_config(config: RunConfig, n_b: int) -> DistConfig:
    _, n_auto = recommend_dims(config.budget, n_b, config.epsilon, config.sketch_delta)
    sketch = None
    if config.pcps_cols is not None:
        sketch = SketchSpec("pcps-cols", _resolve_dim(config.pcps_cols, n_auto), config.epsilon,
                            config.sketch_delta, config.seed)
    elif config.sample_cols is not None:
        sketch = SketchSpec("column-sample", _resolve_dim(config.sample_cols, n_auto), config.epsilon,
                            config.sketch_delta, config.seed)
    common = dict(machines=config.machines, epochs=config.epochs or 1, seed=config.seed, sketch=sketch,
                  max_workers=config.workers)
    if config.sigma_estimate is not None:
        return DistConfig.from_sigma(config.k, config.sigma_estimate, **common)
    return DistConfig(k=config.k, k_prime=config.k_prime or config.budget,
                      k_dprime=config.k_dprime or config.budget, **common)


def cmd_select(config: RunConfig) -> RunReport:
    """
    Run the configured pipeline: load, optional sketch, selector, exact evaluation, optional oracle.

    Args:
        config: validated run configuration

    Returns:
        RunReport, already written to ``config.output_path``
    """
    timings = Timings()
    start = time.perf_counter()
    a = load_matrix(config.matrix_path)
    b = load_matrix(config.candidates_path) if config.candidates_path else a
    if a.rows != b.rows:
        raise DimensionMismatchError(f"A has {a.rows} rows but B has {b.rows}")
    timings.load = time.perf_counter() - start

    if config.method == "dist":
        start = time.perf_counter()
        dist_cfg = _dist_config(config, b.cols)
        outcome = dist_greedy_epochs(a, b, dist_cfg)
        timings.select = time.perf_counter() - start
        start = time.perf_counter()
        chosen = outcome.epoch_union.to_list()
        final = coverage_of(a, b, chosen) if chosen else 0.0
        result = outcome.to_dict()
        result["config"] = dist_cfg.to_dict()
        timings.evaluate = time.perf_counter() - start
    else:
        start = time.perf_counter()
        target_a, target_b, applied = _sketch_target(config, a, b)
        timings.sketch = time.perf_counter() - start

        start = time.perf_counter()
        r = config.budget
        if config.method == "greedy":
            selection = greedy(target_a, target_b, r)
        elif config.method == "lazier":
            selection = lazier_greedy(target_a, target_b, r, LazierParams(delta=config.delta, k=config.k),
                                      seed=config.seed)
        else:
            selection = random_baseline(target_a, target_b, r, seed=config.seed)
        timings.select = time.perf_counter() - start

        start = time.perf_counter()
        selection = evaluate_exact(a, b, selection)
        timings.evaluate = time.perf_counter() - start
        chosen = selection.chosen.to_list()
        final = selection.final_coverage
        result = selection.to_dict()
        result["sketches"] = applied

    oracle = None
    if config.oracle:
        start = time.perf_counter()
        opt = brute_force_opt(a, b, config.k)
        kappa = opt.spectrum.kappa
        oracle = OracleSummary(
            opt_set=opt.opt_set.to_list(),
            opt_value=opt.opt_value,
            sigma_min=opt.spectrum.sigma_min,
            kappa=None if kappa == float("inf") else kappa,
            pca_upper_bound=pca_upper_bound(a, config.k),
            subsets_evaluated=opt.subsets_evaluated,
        )
        timings.oracle = time.perf_counter() - start

    a_norm_sq = frobenius_sq(a)
    report = RunReport(
        version=__version__,
        config=config,
        method=config.method,
        chosen=chosen,
        final_coverage=max(final, 0.0),
        coverage_ratio=max(final, 0.0) / a_norm_sq if a_norm_sq > 0.0 else 0.0,
        frobenius_sq=a_norm_sq,
        result=result,
        oracle=oracle,
        timings=timings,
    )
    report.write(config.output_path)
    logger.info(f"Report written to {config.output_path}")
    return report


def cmd_bench(suite: str, seed: int = 0, trials: Optional[int] = None, out: Optional[Path] = None,
              progress: bool = False) -> SuiteReport:
    """Run one acceptance suite and write its report to ``out`` when given."""
    report = run_suite(suite, seed=seed, trials=trials, progress=progress)
    if out is not None:
        report.write(out)
        logger.info(f"Suite report written to {out}")
    return report


def _configure_logging(verbose: bool, quiet: bool) -> None:
    logging.basicConfig(level=get_settings().log_level, format=LOG_FORMAT)
    if quiet:
        logging.disable(logging.CRITICAL)
        return
    logging.disable(logging.NOTSET)
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)


def _error_line(exc: BaseException) -> None:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv`` and execute one command; returns the process exit code."""
    parser = create_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors are user errors (1); --help / --version exit 0
        return 0 if exc.code in (0, None) else 1

    try:
        if args.command == "schema":
            print(json.dumps(RunReport.model_json_schema(), indent=2))
            return 0

        _configure_logging(args.verbose, args.quiet)
        logger.debug(f"Command line arguments: {args}")

        if args.command == "bench":
            report = cmd_bench(args.suite, seed=args.seed, trials=args.trials, out=args.out, progress=not args.quiet)
            failed = [c.name for c in report.cases if not c.passed]
            print(f"{report.suite}: {len(report.cases) - len(failed)}/{len(report.cases)} cases passed"
                  + (f"; failed: {', '.join(failed)}" if failed else ""))
            return 0 if report.passed else 1

        config = build_config(args)
        report = cmd_select(config)
        print(f"{report.method}: chose {report.chosen} coverage_ratio={report.coverage_ratio:.6f} "
              f"-> {config.output_path}")
        return 0
    except GuardExceededError as e:
        _error_line(e)
        return 2
    except (ColselError, OSError, ValidationError, json.JSONDecodeError) as e:
        _error_line(e)
        return 1
    except KeyboardInterrupt:
        print("\n\nInterrupted by user", file=sys.stderr)
        return 1


def main():
    """Main entry point for the CLI application."""
    sys.exit(run())


if __name__ == "__main__":
    main()
