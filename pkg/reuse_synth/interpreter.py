"""Call-by-value evaluator with a step budget.

Evaluation never raises on a bad program. An exhausted budget or `head nil`
comes back as an `EvalFailure` value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from reuse_synth.errors import LoadError
from reuse_synth.syntax import (
    Apply,
    BoolLit,
    CharLit,
    Definition,
    Expression,
    Hole,
    If,
    InducedProgram,
    Lambda,
    NumLit,
    RecDef,
    Var,
)

DEFAULT_FUEL = 100_000


@dataclass(frozen=True, slots=True)
class VInt:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class VChar:
    value: str

    def __str__(self) -> str:
        return repr(self.value)


@dataclass(frozen=True, slots=True)
class VBool:
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True, slots=True)
class VList:
    items: tuple[Value, ...]

    def __str__(self) -> str:
        return "[" + ", ".join(str(v) for v in self.items) + "]"


@dataclass(eq=False, slots=True)
class VClosure:
    params: tuple[str, ...]
    body: Expression
    env: dict[str, Value]

    def __str__(self) -> str:
        return f"<closure/{len(self.params)}>"


@dataclass(frozen=True, slots=True)
class VPrimitive:
    name: str
    arity: int
    fn: Callable = field(compare=False)
    args: tuple[Value, ...] = ()

    def __str__(self) -> str:
        return f"<primitive {self.name}>"


Value = Union[VInt, VChar, VBool, VList, VClosure, VPrimitive]
RuntimeEnvironment = dict[str, Value]


@dataclass(frozen=True, slots=True)
class EvalFailure:
    reason: str

    def __str__(self) -> str:
        return f"evaluation failure: {self.reason}"


class _Abort(Exception):
    def __init__(self, reason: str):
        self.reason = reason


class Budget:
    """Counts Apply reductions and primitive applications against maxSteps."""

    __slots__ = ("max_steps", "steps")

    def __init__(self, max_steps: int = DEFAULT_FUEL):
        if max_steps <= 0:
            raise ValueError(f"budget must be positive, got {max_steps}")
        self.max_steps = max_steps
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise _Abort(f"step budget of {self.max_steps} exhausted")


def _int(v: Value) -> int:
    if not isinstance(v, VInt):
        raise _Abort(f"expected an integer, got {v}")
    return v.value


def _char(v: Value) -> str:
    if not isinstance(v, VChar):
        raise _Abort(f"expected a character, got {v}")
    return v.value


def _list(v: Value) -> tuple[Value, ...]:
    if not isinstance(v, VList):
        raise _Abort(f"expected a list, got {v}")
    return v.items


def _head(xs: Value) -> Value:
    items = _list(xs)
    if not items:
        raise _Abort("head of empty list")
    return items[0]


def _tail(xs: Value) -> Value:
    items = _list(xs)
    if not items:
        raise _Abort("tail of empty list")
    return VList(items[1:])


def _equal(a: Value, b: Value) -> Value:
    if isinstance(a, (VClosure, VPrimitive)) or isinstance(b, (VClosure, VPrimitive)):
        raise _Abort("equality on functions")
    return VBool(a == b)


def _not(b: Value) -> Value:
    if not isinstance(b, VBool):
        raise _Abort(f"expected a boolean, got {b}")
    return VBool(not b.value)


_PRIMITIVES: dict[str, tuple[int, Callable]] = {
    "+": (2, lambda a, b: VInt(_int(a) + _int(b))),
    "-": (2, lambda a, b: VInt(_int(a) - _int(b))),
    "*": (2, lambda a, b: VInt(_int(a) * _int(b))),
    "<": (2, lambda a, b: VBool(_int(a) < _int(b))),
    "=": (2, _equal),
    ":": (2, lambda x, xs: VList((x,) + _list(xs))),
    "append": (2, lambda xs, ys: VList(_list(xs) + _list(ys))),
    "head": (1, _head),
    "tail": (1, _tail),
    "not": (1, _not),
    "isUpper": (1, lambda c: VBool(_char(c).isupper())),
    "isAlpha": (1, lambda c: VBool(_char(c).isalpha())),
    "isNum": (1, lambda c: VBool(_char(c).isdigit())),
}


def primitive_environment() -> RuntimeEnvironment:
    env: RuntimeEnvironment = {name: VPrimitive(name, arity, fn) for name, (arity, fn) in _PRIMITIVES.items()}
    env["nil"] = VList(())
    return env


def apply_value(fn: Value, arg: Value, budget: Budget) -> Value:
    budget.tick()
    if isinstance(fn, VClosure):
        env = dict(fn.env)
        env[fn.params[0]] = arg
        if len(fn.params) > 1:
            return VClosure(fn.params[1:], fn.body, env)
        return _eval(env, fn.body, budget)
    if isinstance(fn, VPrimitive):
        args = fn.args + (arg,)
        if len(args) < fn.arity:
            return VPrimitive(fn.name, fn.arity, fn.fn, args)
        return fn.fn(*args)
    raise _Abort(f"cannot apply non-function {fn}")


def _eval(env: Mapping[str, Value], e: Expression, budget: Budget) -> Value:
    match e:
        case NumLit(value):
            return VInt(value)
        case CharLit(value):
            return VChar(value)
        case BoolLit(value):
            return VBool(value)
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise _Abort(f"unbound name {name}") from None
        case Lambda(params, body):
            return VClosure(params, body, dict(env))
        case Apply(fn, arg):
            f = _eval(env, fn, budget)
            x = _eval(env, arg, budget)
            return apply_value(f, x, budget)
        case If(cond, then_branch, else_branch):
            c = _eval(env, cond, budget)
            if not isinstance(c, VBool):
                raise _Abort(f"condition is not a boolean: {c}")
            return _eval(env, then_branch if c.value else else_branch, budget)
        case Hole(index):
            raise _Abort(f"hole ?{index} reached during evaluation")
    raise _Abort(f"not an expression: {e!r}")


def _guarded(thunk: Callable[[], Value]) -> Value | EvalFailure:
    try:
        return thunk()
    except _Abort as abort:
        return EvalFailure(abort.reason)
    except RecursionError:
        return EvalFailure("recursion too deep")


def eval_expr(env: Mapping[str, Value], e: Expression, budget: Budget | None = None) -> Value | EvalFailure:
    budget = budget or Budget()
    return _guarded(lambda: _eval(env, e, budget))


def eval_application(fn: Value, arg: Value, budget: Budget | None = None) -> Value | EvalFailure:
    budget = budget or Budget()
    return _guarded(lambda: apply_value(fn, arg, budget))


def define(env: RuntimeEnvironment, definition: Definition, budget: Budget | None = None) -> Value | EvalFailure:
    """Evaluate a val/rec definition into env; a rec closure sees its own name."""
    value = eval_expr(env, definition.body, budget)
    if isinstance(value, EvalFailure):
        return value
    env[definition.name] = value
    if isinstance(definition, RecDef) and isinstance(value, VClosure):
        # tie the knot: the closure's captured environment now binds its own name
        value.env[definition.name] = value
    return value


def base_environment(definitions: list[Definition], budget: Budget | None = None) -> RuntimeEnvironment:
    """Primitives plus the given combinators and background functions, in file order."""
    env = primitive_environment()
    for definition in definitions:
        result = define(env, definition, budget)
        if isinstance(result, EvalFailure):
            raise LoadError(f"line {definition.line}: cannot evaluate {definition.name}: {result.reason}")
    return env


def load_program(
    base: Mapping[str, Value],
    program: InducedProgram,
    order: list[str] | None = None,
    budget: Budget | None = None,
) -> RuntimeEnvironment:
    """Extend base with the program's functions, dependencies first."""
    order = order if order is not None else program.dependency_order()
    env = dict(base)
    for name in order:
        if name in base:
            raise LoadError(f"induced function {name} collides with an existing definition")
        value = eval_expr(env, program.get(name).body, budget)
        if isinstance(value, EvalFailure):
            raise LoadError(f"cannot evaluate induced function {name}: {value.reason}")
        env[name] = value
    return env


def to_value(py) -> Value:
    """Build a runtime value from Python ints, bools, one-character strings and lists."""
    if isinstance(py, bool):
        return VBool(py)
    if isinstance(py, int):
        return VInt(py)
    if isinstance(py, str) and len(py) == 1:
        return VChar(py)
    if isinstance(py, (list, tuple)):
        return VList(tuple(to_value(x) for x in py))
    raise TypeError(f"no runtime value for {py!r}")


def is_first_order(v: Value) -> bool:
    if isinstance(v, VList):
        return all(is_first_order(x) for x in v.items)
    return isinstance(v, (VInt, VChar, VBool))
