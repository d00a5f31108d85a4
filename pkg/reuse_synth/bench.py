from __future__ import annotations

from dataclasses import replace

import pandas as pd
from loguru import logger
from tqdm import tqdm

from reuse_synth.problems import BenchSpec, generate_problem
from reuse_synth.runner import RunOutcome, RunReport, run_source
from reuse_synth.search import SearchConfig

BENCH_COLUMNS = [
    "problem",
    "reuse",
    "algorithm",
    "mean_seconds",
    "std_error",
    "function_count",
    "states_visited",
    "outcome",
]
ADD_N_SWEEP = range(4, 11)
DROPLASTS_SWEEP = range(0, 9)


def _repetitions(spec: BenchSpec, timeout: float | None) -> list[RunReport]:
    source = generate_problem(spec)
    reports = []
    description = f"{spec.label} reuse={spec.config.reuse} {spec.config.algorithm.value}"
    for _ in tqdm(range(spec.repeats), desc=description, leave=False):
        report = run_source(source, spec.config, timeout)
        reports.append(report)
        # a failed or exhausted run will not change on repetition
        if report.outcome is not RunOutcome.SOLVED:
            break
    return reports


def summarize(spec: BenchSpec, reports: list[RunReport]) -> dict:
    """One table row: mean wall time and its standard error over the repetitions."""
    times = pd.Series([r.wall_time for r in reports], dtype="float64")
    std_error = times.sem(ddof=1) if len(times) > 1 else 0.0
    last = reports[-1]
    return {
        "problem": spec.label,
        "reuse": spec.config.reuse,
        "algorithm": spec.config.algorithm.value,
        "mean_seconds": times.mean(),
        "std_error": std_error,
        "function_count": last.function_count,
        "states_visited": last.states_visited,
        "outcome": last.outcome.value,
    }


def bench(spec: BenchSpec, timeout: float | None = None) -> pd.DataFrame:
    """Run `spec` with reuse on and with reuse off; one row each."""
    rows = []
    for reuse in (True, False):
        run_spec = replace(spec, config=replace(spec.config, reuse=reuse))
        logger.info(f"Benchmarking {run_spec.label} reuse={reuse} ({run_spec.repeats} repeats)")
        reports = _repetitions(run_spec, timeout)
        row = summarize(run_spec, reports)
        logger.info(
            f"{row['problem']} reuse={reuse}: {row['outcome']} in {row['mean_seconds']:.3f}s "
            f"+/- {row['std_error']:.3f}, {row['function_count']} functions"
        )
        rows.append(row)
    return pd.DataFrame(rows, columns=BENCH_COLUMNS)


def bench_many(specs: list[BenchSpec], timeout: float | None = None) -> pd.DataFrame:
    frames = [bench(spec, timeout) for spec in specs]
    return pd.concat(frames, ignore_index=True)


def sweep_specs(name: str, repeats: int, config: SearchConfig) -> list[BenchSpec]:
    """addN for N = 4..10, or droplasts with 0..8 identity functions as noise."""
    if name == "addN-sweep":
        return [BenchSpec("addN", n=n, repeats=repeats, config=config) for n in ADD_N_SWEEP]
    if name == "droplasts-sweep":
        return [BenchSpec("droplasts", noise=k, repeats=repeats, config=config) for k in DROPLASTS_SWEEP]
    raise ValueError(f"unknown sweep {name!r}")


def write_csv(table: pd.DataFrame, path: str) -> None:
    table.to_csv(path, index=False)
    logger.info(f"Wrote {len(table)} rows to {path}")


def read_csv(path: str) -> pd.DataFrame:
    return pd.read_csv(path)

