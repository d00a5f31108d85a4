import os
import sys
import time
from argparse import ArgumentParser, BooleanOptionalAction

from loguru import logger as lager

# Set the base directory so config/config.json is found from any working directory
base_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))  # __file__ is the .py file executed

from reuse_synth.bench import bench, bench_many, sweep_specs, write_csv
from reuse_synth.errors import SynthError
from reuse_synth.problems import PROBLEMS, BenchSpec
from reuse_synth.read_config import load_config, search_config_from
from reuse_synth.runner import EXIT_CODES, RunOutcome, run_file

SWEEPS = ("addN-sweep", "droplasts-sweep")


def parse_args_into(parser: ArgumentParser) -> None:
    parser.add_argument("file", metavar="FILE", nargs="?", default=None, help="problem file to synthesize from")
    parser.add_argument("--no-reuse", dest="reuse", action="store_false", default=None,
                        help="only fill holes with background functions or new inventions")
    parser.add_argument("--algorithm", choices=["linear", "branching"], default=None,
                        help="A_linear (types during search) or A_branching (types at check); default branching")
    parser.add_argument("--max-depth", type=int, default=None, help="most invented functions to try (default 8)")
    parser.add_argument("--fuel", type=int, default=None, help="evaluation steps per example (default 100000)")
    parser.add_argument("--identity-template", action="store_true", default=None,
                        help="add the bare-hole template")
    parser.add_argument("--target-type-pruning", action=BooleanOptionalAction, default=None,
                        help="drop linear states whose target type cannot match the goal (default on)")
    parser.add_argument("--timeout", type=float, default=None, help="seconds per search (default 600)")
    parser.add_argument("--bench", choices=list(PROBLEMS) + list(SWEEPS), default=None,
                        help="run a generated benchmark instead of FILE")
    parser.add_argument("--repeats", type=int, default=None, help="bench repetitions (default 5)")
    parser.add_argument("--csv", type=str, default=None, help="write the bench table here")
    parser.add_argument("--n", type=int, default=8, help="N for addN")
    parser.add_argument("--size", type=int, default=4, help="side length for maze")
    parser.add_argument("--noise", type=int, default=0, help="identity functions added to droplasts")
    parser.add_argument("--config", type=str, default=os.path.join(base_dir, "config/config.json"),
                        help="JSON config file")
    parser.add_argument("--log-level", type=str, default=None, help="loguru level for stderr")


def get_args(argv=None):
    """Parse the command line; FILE is required unless --bench is given."""
    parser = ArgumentParser(prog="reuse_synth", description="Synthesize functional programs from examples.")
    parse_args_into(parser)
    args = parser.parse_args(argv)
    if args.file is None and args.bench is None:
        parser.error("give a problem FILE or --bench PROBLEM")
    return args


def _configure_logging(level: str) -> None:
    lager.remove()
    lager.add(sys.stderr, level=level.upper())


def run(argv=None) -> int:
    """
    Synthesize a program from a problem file, or benchmark a generated problem.

    A problem file lists template combinators, `BK_` background functions,
    positive and negative examples and one `Synthesize` goal.  The program
    found is printed to stdout; logs go to stderr.

    Exit codes: 0 solved, 2 exhausted (or timed out), 1 error.
    """
    program_start_time = time.time()
    args = get_args(argv)
    try:
        config = load_config(args.config)
    except (OSError, ValueError) as err:
        lager.error(f"Cannot read configuration: {err}")
        return EXIT_CODES[RunOutcome.ERROR]
    _configure_logging(args.log_level or config["logging"]["level"])

    try:
        search_config = search_config_from(
            config,
            {
                "reuse": args.reuse,
                "algorithm": args.algorithm,
                "max_depth": args.max_depth,
                "fuel": args.fuel,
                "identity_template": args.identity_template,
                "target_type_pruning": args.target_type_pruning,
            },
        )
    except ValueError as err:
        lager.error(f"Bad configuration: {err}")
        return EXIT_CODES[RunOutcome.ERROR]
    timeout = args.timeout if args.timeout is not None else config["search"].get("timeout")

    if args.bench is not None:
        repeats = args.repeats if args.repeats is not None else config["bench"]["repeats"]
        csv_path = args.csv or config["bench"].get("csv")
        try:
            if args.bench in SWEEPS:
                table = bench_many(sweep_specs(args.bench, repeats, search_config), timeout)
            else:
                spec = BenchSpec(args.bench, n=args.n, size=args.size, noise=args.noise,
                                 repeats=repeats, config=search_config)
                table = bench(spec, timeout)
        except (SynthError, ValueError) as err:
            lager.error(f"Benchmark failed: {err}")
            return EXIT_CODES[RunOutcome.ERROR]
        print(table.to_string(index=False))
        if csv_path:
            write_csv(table, csv_path)
        lager.info(f"Total Time of program: {time.time() - program_start_time:.2f}s")
        return 0

    report = run_file(args.file, search_config, timeout)
    if report.outcome is RunOutcome.SOLVED:
        print(report.program)
        lager.info(report.summary())
    elif report.outcome is RunOutcome.EXHAUSTED:
        lager.warning(report.summary())
    lager.info(f"Total Time of program: {time.time() - program_start_time:.2f}s")
    return report.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
