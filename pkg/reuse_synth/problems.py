from __future__ import annotations

import textwrap
from dataclasses import dataclass, field

from loguru import logger

from reuse_synth.errors import ProblemError
from reuse_synth.parser import SourceFile, parse_source
from reuse_synth.search import SearchConfig

PROBLEMS = ("addN", "filterUpNum", "addRevFilter", "maze", "droplasts", "droplasts-mixed")

TEMPLATES = textwrap.dedent("""\
    val comp(f, g) = lambda (x) f(g(x)) ;;

    rec map(f) = lambda (xs)
        (if xs = nil
        then nil
        else f(head(xs)):map(f)(tail(xs))) ;;

    rec filter(p) = lambda (xs)
        (if xs = nil
        then nil
        else
            if (p(head(xs)))
            then head(xs):filter(p)(tail(xs))
            else filter(p)(tail(xs))) ;;
    """)

REVERSE = "rec BK_reverse(xs) = if xs = nil then nil else append(BK_reverse(tail(xs)), head(xs) : nil) ;;\n"


@dataclass(frozen=True)
class BenchSpec:
    problem: str
    n: int = 8
    size: int = 4
    noise: int = 0
    blocked: frozenset[tuple[int, int]] = frozenset()
    repeats: int = 5
    config: SearchConfig = field(default_factory=SearchConfig)

    def __post_init__(self):
        if self.repeats < 1:
            raise ValueError(f"repeats must be at least 1, got {self.repeats}")

    @property
    def label(self) -> str:
        if self.problem == "addN":
            return f"add{self.n}"
        if self.problem == "maze":
            return f"maze{self.size}x{self.size}"
        if self.problem == "droplasts":
            return f"droplasts+{self.noise}"
        return self.problem


def _examples(positives: list[tuple[str, str]], negatives: list[tuple[str, str]], goal: str) -> str:
    lines = [f"PEx {i} => {o} ;;" for i, o in positives]
    lines += [f"NEx {i} => {o} ;;" for i, o in negatives]
    lines.append(f"Synthesize {goal} ;;")
    return "\n".join(lines) + "\n"


def add_n_text(n: int) -> str:
    """add1 only; x -> x + N twice, and two near misses x -> x + M with M != N."""
    misses = [m for m in range(1, n + 3) if m != n][:2]
    positives = [("(1)", f"{1 + n}"), ("(7)", f"{7 + n}")]
    negatives = [("(1)", f"{1 + misses[0]}"), ("(3)", f"{3 + misses[1]}")]
    return (
        TEMPLATES
        + "\nval BK_add1(x) = x + 1 ;;\n\n"
        + _examples(positives, negatives, "(Int) => Int")
    )


def filter_up_num_text() -> str:
    background = textwrap.dedent("""\
        val BK_isUpper(c) = isUpper(c) ;;
        val BK_isAlpha(c) = isAlpha(c) ;;
        val BK_isNum(c) = isNum(c) ;;
        val BK_not(b) = not(b) ;;
        """)
    positives = [
        ("['a', 'B', '1', 'c']", "['a', 'c']"),
        ("['X', 'y', '7', 'z', 'Q', '0']", "['y', 'z']"),
    ]
    # dropping only one of the two classes is not enough
    negatives = [
        ("['a', 'B', '1']", "['a', '1']"),
        ("['a', 'B', '1']", "['a', 'B']"),
    ]
    return TEMPLATES + "\n" + background + "\n" + _examples(positives, negatives, "([Char]) => [Char]")


def add_rev_filter_text() -> str:
    background = (
        "val BK_add1(x) = x + 1 ;;\n"
        "val BK_add2(x) = x + 2 ;;\n"
        "rec BK_isOdd(x) = if x = 0 then false else if x = 1 then true else BK_isOdd(x - 2) ;;\n"
        + REVERSE
    )
    positives = [("[1, 2, 3]", "[7, 5]"), ("[4, 7, 10, 1]", "[5, 11]")]
    negatives = [("[2, 3]", "[5]"), ("[1, 2, 3]", "[5, 7]")]
    return TEMPLATES + "\n" + background + "\n" + _examples(positives, negatives, "([Int]) => [Int]")


def _blocked_test(x: str, y: str, blocked: frozenset[tuple[int, int]]) -> str | None:
    if not blocked:
        return None
    test = "false"
    for bx, by in sorted(blocked, reverse=True):
        test = f"(if {x} = {bx} then (if {y} = {by} then true else {test}) else {test})"
    return test


def _move(name: str, guard: str, x: str, y: str, blocked: frozenset[tuple[int, int]]) -> str:
    moved = f"({x}) : ({y}) : nil"
    hit = _blocked_test(x, y, blocked)
    if hit is not None:
        moved = f"(if {hit} then p else {moved})"
    return f"val BK_{name}(p) = if {guard} then {moved} else p ;;"


def maze_text(size: int, blocked: frozenset[tuple[int, int]] = frozenset()) -> str:
    """Robot moves over a size x size grid; a move off the grid or into a blocked cell is ignored.

    The position is the two-element list [x, y]; the robot starts at (0, 0)
    and has to reach (size - 1, size - 1).
    """
    if size < 2:
        raise ProblemError(f"maze size must be at least 2, got {size}")
    if (0, 0) in blocked or (size - 1, size - 1) in blocked:
        raise ProblemError("start and goal cells cannot be blocked")
    x, y = "head(p)", "head(tail(p))"
    moves = [
        _move("mRight", f"{x} + 1 < {size}", f"{x} + 1", y, blocked),
        _move("mLeft", f"0 < {x}", f"{x} - 1", y, blocked),
        _move("mDown", f"0 < {y}", x, f"{y} - 1", blocked),
        _move("mUp", f"{y} + 1 < {size}", x, f"{y} + 1", blocked),
    ]
    goal = size - 1
    return (
        TEMPLATES
        + "\n"
        + "\n".join(moves)
        + "\n\n"
        + _examples([("[0, 0]", f"[{goal}, {goal}]")], [], "([Int]) => [Int]")
    )


_DROPLASTS_EXAMPLES = (
    [("[[1, 2, 3], [4, 5], [6, 7, 8]]", "[[1, 2], [4]]"), ("[[3, 1], [9, 8, 7, 5], [2, 4]]", "[[3], [9, 8, 7]]")],
    [],
)


def droplasts_text(noise: int) -> str:
    """reverse and tail, plus `noise` identity functions under distinct names."""
    if noise < 0:
        raise ProblemError(f"noise must be non-negative, got {noise}")
    background = REVERSE + "val BK_tail(xs) = tail(xs) ;;\n"
    background += "".join(f"val BK_id{i}(x) = x ;;\n" for i in range(1, noise + 1))
    positives, negatives = _DROPLASTS_EXAMPLES
    return TEMPLATES + "\n" + background + "\n" + _examples(positives, negatives, "([[Int]]) => [[Int]]")


def droplasts_mixed_text() -> str:
    """reverse and tail with addOne, addTwo, isOdd and id as noise."""
    background = (
        REVERSE
        + "val BK_tail(xs) = tail(xs) ;;\n"
        + "val BK_addOne(x) = x + 1 ;;\n"
        + "val BK_addTwo(x) = x + 2 ;;\n"
        + "rec BK_isOdd(x) = if x = 0 then false else if x = 1 then true else BK_isOdd(x - 2) ;;\n"
        + "val BK_id(x) = x ;;\n"
    )
    positives, negatives = _DROPLASTS_EXAMPLES
    return TEMPLATES + "\n" + background + "\n" + _examples(positives, negatives, "([[Int]]) => [[Int]]")


def problem_text(spec: BenchSpec) -> str:
    match spec.problem:
        case "addN":
            if spec.n < 1:
                raise ProblemError(f"addN needs N >= 1, got {spec.n}")
            return add_n_text(spec.n)
        case "filterUpNum":
            return filter_up_num_text()
        case "addRevFilter":
            return add_rev_filter_text()
        case "maze":
            return maze_text(spec.size, spec.blocked)
        case "droplasts":
            return droplasts_text(spec.noise)
        case "droplasts-mixed":
            return droplasts_mixed_text()
    raise ProblemError(f"unknown problem {spec.problem!r}; choose one of {', '.join(PROBLEMS)}")


def generate_problem(spec: BenchSpec) -> SourceFile:
    text = problem_text(spec)
    logger.debug(f"Generated {spec.label}:\n{text}")
    return parse_source(text, f"<{spec.label}>")
