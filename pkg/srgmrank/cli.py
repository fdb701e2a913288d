"""Command line for fitting, scoring and ranking software reliability growth models.

Usage examples::

    srgmrank fit --dataset weekly_faults.csv --output-dir results
    srgmrank rank --config run.cfg
    srgmrank rank --criteria-csv published_criteria.csv --output-dir replay
    srgmrank curve LogGro --config run.cfg
    srgmrank report --config run.cfg --seed 7

Exit status: 0 on success, 1 for usage or configuration errors, 2 for dataset
errors and 3 for numerical failures.
"""
import argparse
import logging
import sys
import timeit

from srgmrank import pipeline
from srgmrank.config import RunConfig
from srgmrank.errors import SrgmRankError
from srgmrank.evaluation.ranking import PRR_DIRECTIONS

USAGE_ERROR = 1


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _comma_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _add_run_arguments(parser):
    parser.add_argument("--config", help="key=value config file; flags override its values")
    parser.add_argument("--dataset", help="dataset CSV with header t,cumulative_faults")
    parser.add_argument("--output-dir", dest="output_dir", help="folder for all outputs (default: results)")
    parser.add_argument("--models", type=_comma_list, help="comma-separated model names (default: all 16)")
    parser.add_argument("--criteria", type=_comma_list, help="comma-separated criteria used for ranking")
    parser.add_argument("--seed", type=int, help="base seed of the optimizer")
    parser.add_argument("--pop", type=int, help="population size (default: 40)")
    parser.add_argument("--r-a", dest="r_a", type=float, help="attenuation rate (default: 1)")
    parser.add_argument("--p-c", dest="p_c", type=float, help="mask keeping probability (default: 0.7)")
    parser.add_argument("--p-m", dest="p_m", type=float, help="mask bit probability (default: 0.1)")
    parser.add_argument("--max-iters", dest="max_iters", type=int, help="iterations per fit (default: 500)")
    parser.add_argument("--intensity-constant", dest="intensity_constant", type=float, help="intensity constant C (default: -1e-6)")
    parser.add_argument("--stall-iters", dest="stall_iters", type=int, help="stop after this many iterations without improvement")
    parser.add_argument("--restarts", type=int, help="optimizer runs per model (default: 1)")
    parser.add_argument("--prr-direction", dest="prr_direction", choices=PRR_DIRECTIONS, help="PRR handling of the ranking")
    parser.add_argument("--pin-ztp-p", dest="pin_ztp_p", action="store_const", const=True, help="fix p=1 when fitting Z-T-P")
    parser.add_argument("--workers", type=int, help="parallel fitting processes (default: one per CPU)")
    parser.add_argument("--grid-points", dest="grid_points", type=int, help="dense grid size of curve files (default: 200)")
    parser.add_argument("--no-progress", dest="progress", action="store_false", help="hide the progress bar")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def create_parser():
    parser = _ArgumentParser(prog="srgmrank", description="Fit, score and rank software reliability growth models")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    fit = subparsers.add_parser("fit", help="estimate model parameters, writes params.csv and fits/")
    _add_run_arguments(fit)

    rank = subparsers.add_parser("rank", help="compute criteria and rank models, writes criteria.csv and ranking.csv")
    _add_run_arguments(rank)
    rank.add_argument("--criteria-csv", dest="criteria_csv", help="rank a precomputed criteria table instead of fits")

    curve = subparsers.add_parser("curve", help="write observed and fitted curve data of one model")
    _add_run_arguments(curve)
    curve.add_argument("model", help="model name, e.g. LogGro or GoelOkumoto")

    report = subparsers.add_parser("report", help="fit, rank and write curves in one run")
    _add_run_arguments(report)
    return parser


def _overrides(args):
    keys = (
        "dataset", "output_dir", "models", "criteria", "seed", "pop", "r_a", "p_c", "p_m", "max_iters",
        "intensity_constant", "stall_iters", "restarts", "prr_direction", "pin_ztp_p", "workers", "grid_points",
    )
    return {key: getattr(args, key) for key in keys}


def run(args):
    config = RunConfig.from_sources(args.config, _overrides(args))
    start_time = timeit.default_timer()
    if args.command == "fit":
        pipeline.run_fit(config, progress=args.progress)
    elif args.command == "rank":
        result = pipeline.run_rank(config, criteria_csv=args.criteria_csv)
        print(result.to_frame().sort_values("rank").to_string())
    elif args.command == "curve":
        print(f"Stored curve in {pipeline.run_curve(config, args.model)}")
    else:
        pipeline.run_report(config, progress=args.progress)
    elapsed = timeit.default_timer() - start_time
    print(f"Time to run '{args.command}': {elapsed:.3f} sec")


def main(argv=None):
    """Entry point of the ``srgmrank`` command

    Returns:
        int: exit status
    """
    args = create_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )
    try:
        run(args)
    except SrgmRankError as e:
        print(f"srgmrank: error: {e}", file=sys.stderr)
        return e.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
