"""Run one problem file end to end and summarise the search as a RunReport."""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum

from loguru import logger

from reuse_synth.errors import SynthError
from reuse_synth.parser import SourceFile, parse_source, read_source_file, split_knowledge
from reuse_synth.search import Outcome, SearchConfig, SearchContext, build_examples, prog_search
from reuse_synth.syntax import render_program


class RunOutcome(str, Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    ERROR = "error"


EXIT_CODES = {RunOutcome.SOLVED: 0, RunOutcome.EXHAUSTED: 2, RunOutcome.ERROR: 1}


@dataclass(frozen=True)
class RunReport:
    program: str
    function_count: int
    states_visited: int
    wall_time: float
    depth_reached: int
    outcome: RunOutcome
    message: str = ""

    def __post_init__(self):
        if self.outcome is RunOutcome.SOLVED and (not self.program or self.function_count < 1):
            raise ValueError("a solved report needs a program with at least one function")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.outcome]

    def summary(self) -> str:
        line = (
            f"{self.outcome.value}: {self.function_count} functions, "
            f"{self.states_visited} states, depth {self.depth_reached}, {self.wall_time:.3f}s"
        )
        return f"{line} ({self.message})" if self.message else line


def run_source(source: SourceFile, config: SearchConfig, timeout: float | None = None) -> RunReport:
    """Synthesize a program for an already parsed file.

    A search cut short by `timeout` seconds is reported as exhausted with the
    timeout as its wall time.  Any SynthError becomes an error report.
    """
    start = time.perf_counter()
    try:
        knowledge = split_knowledge(source)
        context = SearchContext.build(knowledge, config)
        logger.info(
            f"{len(context.templates)} templates, {len(context.background)} background functions, "
            f"goal {context.goal_type}"
        )
        examples = build_examples(knowledge, context, config.fuel)
        deadline = start + timeout if timeout is not None else None
        result = prog_search(config, context, examples, deadline)
        elapsed = time.perf_counter() - start
        if result.outcome is Outcome.SOLVED:
            return RunReport(
                render_program(result.program),
                result.function_count,
                result.states_visited,
                elapsed,
                result.depth_reached,
                RunOutcome.SOLVED,
            )
        if result.outcome is Outcome.TIMEOUT:
            return RunReport(
                "", 0, result.states_visited, timeout, result.depth_reached, RunOutcome.EXHAUSTED,
                f"timed out after {timeout}s",
            )
        return RunReport(
            "", 0, result.states_visited, elapsed, result.depth_reached, RunOutcome.EXHAUSTED,
            f"no program with at most {config.max_depth} functions",
        )
    except SynthError as err:
        logger.error(f"{source.path}: {err}")
        return RunReport("", 0, 0, time.perf_counter() - start, 0, RunOutcome.ERROR, str(err))


def run_file(path: str, config: SearchConfig, timeout: float | None = None) -> RunReport:
    try:
        source = read_source_file(path)
    except OSError as err:
        logger.error(f"Cannot read {path}: {err}")
        return RunReport("", 0, 0, 0.0, 0, RunOutcome.ERROR, str(err))
    except SynthError as err:
        logger.error(f"{path}: {err}")
        return RunReport("", 0, 0, 0.0, 0, RunOutcome.ERROR, str(err))
    return run_source(source, config, timeout)


def run_text(text: str, config: SearchConfig, timeout: float | None = None, path: str = "<string>") -> RunReport:
    try:
        source = parse_source(text, path)
    except SynthError as err:
        logger.error(f"{path}: {err}")
        return RunReport("", 0, 0, 0.0, 0, RunOutcome.ERROR, str(err))
    return run_source(source, config, timeout)
