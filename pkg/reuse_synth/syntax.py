"""Abstract syntax of the target language and the printer for induced programs.

Expressions are immutable values.  Holes are numbered placeholders that the
search fills with function names; everything else mirrors a small strict
lambda language with integers, characters, booleans and lists.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Collection, Iterator, Union

from reuse_synth.errors import RenderError

if TYPE_CHECKING:
    from reuse_synth.typesystem import Type


TARGET_NAME = "target"
COMPOSE_NAME = "comp"
_INVENTED = re.compile(r"^(target|g[0-9]+)$")

# binary primitives written infix, with (precedence, associativity)
INFIX_OPERATORS: dict[str, tuple[int, str]] = {
    "=": (1, "none"),
    "<": (1, "none"),
    ":": (2, "right"),
    "+": (3, "left"),
    "-": (3, "left"),
    "*": (4, "left"),
}
_COMPOSE_PREC = 5
_APPLY_PREC = 6
_ATOM_PREC = 7


@dataclass(frozen=True, slots=True)
class NumLit:
    value: int


@dataclass(frozen=True, slots=True)
class CharLit:
    value: str


@dataclass(frozen=True, slots=True)
class BoolLit:
    value: bool


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Lambda:
    params: tuple[str, ...]
    body: Expression


@dataclass(frozen=True, slots=True)
class Apply:
    fn: Expression
    arg: Expression


@dataclass(frozen=True, slots=True)
class If:
    cond: Expression
    then_branch: Expression
    else_branch: Expression


@dataclass(frozen=True, slots=True)
class Hole:
    index: int


Expression = Union[NumLit, CharLit, BoolLit, Var, Lambda, Apply, If, Hole]


@dataclass(frozen=True, slots=True)
class ValDef:
    name: str
    body: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class RecDef:
    name: str
    body: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class PosExample:
    input: Expression
    output: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class NegExample:
    input: Expression
    output: Expression
    line: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class SynthesizeGoal:
    input_type: Type
    output_type: Type
    line: int = field(default=0, compare=False)


Declaration = Union[ValDef, RecDef, PosExample, NegExample, SynthesizeGoal]
Definition = Union[ValDef, RecDef]


@dataclass(frozen=True, slots=True)
class InducedFunction:
    name: str
    body: Expression
    template_name: str | None = None

    @property
    def holes(self) -> list[int]:
        return hole_indices(self.body)

    def is_complete(self, defined: Collection[str]) -> bool:
        """No holes, and every invented name the body mentions is in `defined`."""
        if self.holes:
            return False
        return all(n in defined for n in free_names(self.body) if is_invented_name(n))


@dataclass(frozen=True, slots=True)
class InducedProgram:
    functions: tuple[InducedFunction, ...] = ()
    target_name: str = TARGET_NAME

    def names(self) -> list[str]:
        return [f.name for f in self.functions]

    def get(self, name: str) -> InducedFunction | None:
        for function in self.functions:
            if function.name == name:
                return function
        return None

    def is_complete(self) -> bool:
        """No holes anywhere and every invented name that is mentioned has a definition."""
        defined = set(self.names())
        if self.target_name not in defined:
            return False
        return all(function.is_complete(defined) for function in self.functions)

    def dependency_order(self) -> list[str]:
        """Function names with every dependency listed before its users."""
        from reuse_synth.graph import DependencyGraph

        return DependencyGraph.from_program(self).definition_order()


def is_invented_name(name: str) -> bool:
    return _INVENTED.match(name) is not None


def apply_all(fn: Expression, *args: Expression) -> Expression:
    for arg in args:
        fn = Apply(fn, arg)
    return fn


def unfold_apply(e: Expression) -> tuple[Expression, list[Expression]]:
    args: list[Expression] = []
    while isinstance(e, Apply):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def free_names(e: Expression) -> set[str]:
    match e:
        case Var(name):
            return {name}
        case Lambda(params, body):
            return free_names(body) - set(params)
        case Apply(fn, arg):
            return free_names(fn) | free_names(arg)
        case If(cond, then_branch, else_branch):
            return free_names(cond) | free_names(then_branch) | free_names(else_branch)
        case _:
            return set()


def hole_indices(e: Expression) -> list[int]:
    """Hole indices in left-to-right order."""
    return [h.index for h in _walk(e) if isinstance(h, Hole)]


def _walk(e: Expression) -> Iterator[Expression]:
    yield e
    match e:
        case Lambda(_, body):
            yield from _walk(body)
        case Apply(fn, arg):
            yield from _walk(fn)
            yield from _walk(arg)
        case If(cond, then_branch, else_branch):
            yield from _walk(cond)
            yield from _walk(then_branch)
            yield from _walk(else_branch)


def fill_hole(e: Expression, index: int, filler: Expression) -> Expression:
    match e:
        case Hole(i) if i == index:
            return filler
        case Lambda(params, body):
            return Lambda(params, fill_hole(body, index, filler))
        case Apply(fn, arg):
            return Apply(fill_hole(fn, index, filler), fill_hole(arg, index, filler))
        case If(cond, then_branch, else_branch):
            return If(
                fill_hole(cond, index, filler),
                fill_hole(then_branch, index, filler),
                fill_hole(else_branch, index, filler),
            )
        case _:
            return e


def rename_vars(e: Expression, mapping: dict[str, str]) -> Expression:
    """Rename free occurrences of the names in mapping."""
    match e:
        case Var(name):
            return Var(mapping.get(name, name))
        case Lambda(params, body):
            inner = {k: v for k, v in mapping.items() if k not in params}
            return Lambda(params, rename_vars(body, inner))
        case Apply(fn, arg):
            return Apply(rename_vars(fn, mapping), rename_vars(arg, mapping))
        case If(cond, then_branch, else_branch):
            return If(
                rename_vars(cond, mapping),
                rename_vars(then_branch, mapping),
                rename_vars(else_branch, mapping),
            )
        case _:
            return e


def alpha_equivalent(a: Expression, b: Expression) -> bool:
    return _alpha(a, b, {}, {}, 0)


def _alpha(a: Expression, b: Expression, left: dict[str, int], right: dict[str, int], depth: int) -> bool:
    match a, b:
        case Var(x), Var(y):
            if x in left or y in right:
                return left.get(x) == right.get(y)
            return x == y
        case Lambda(ps, body_a), Lambda(qs, body_b):
            if len(ps) != len(qs):
                return False
            left = {**left, **{p: depth + i for i, p in enumerate(ps)}}
            right = {**right, **{q: depth + i for i, q in enumerate(qs)}}
            return _alpha(body_a, body_b, left, right, depth + len(ps))
        case Apply(f1, x1), Apply(f2, x2):
            return _alpha(f1, f2, left, right, depth) and _alpha(x1, x2, left, right, depth)
        case If(c1, t1, e1), If(c2, t2, e2):
            return (
                _alpha(c1, c2, left, right, depth)
                and _alpha(t1, t2, left, right, depth)
                and _alpha(e1, e2, left, right, depth)
            )
        case _:
            return a == b


def canonical_form(p: InducedProgram) -> InducedProgram:
    """Rename invented functions to target, g2, g3, ... by first mention from target.

    Two programs that differ only in the names picked for invented functions
    have equal canonical forms, and functions come out in that same order.
    """
    order: list[str] = []

    def visit(name: str) -> None:
        if name in order:
            return
        order.append(name)
        function = p.get(name)
        if function is None:
            return
        for e in _walk(function.body):
            if isinstance(e, Var) and is_invented_name(e.name):
                visit(e.name)

    visit(p.target_name)
    for name in p.names():
        visit(name)
    mapping = {name: (TARGET_NAME if i == 0 else f"g{i + 1}") for i, name in enumerate(order)}
    functions = []
    for name in order:
        function = p.get(name)
        if function is not None:
            functions.append(
                InducedFunction(mapping[name], rename_vars(function.body, mapping), function.template_name)
            )
    return InducedProgram(tuple(functions), TARGET_NAME)


def render_expr(e: Expression, compose_name: str = COMPOSE_NAME) -> str:
    return _render(e, 0, compose_name)


def _render(e: Expression, ctx: int, compose_name: str) -> str:
    text, prec = _render_prec(e, compose_name)
    return f"({text})" if prec < ctx else text


def _render_prec(e: Expression, compose_name: str) -> tuple[str, int]:
    match e:
        case NumLit(value):
            return str(value), _ATOM_PREC
        case CharLit(value):
            escaped = value.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
            return f"'{escaped}'", _ATOM_PREC
        case BoolLit(value):
            return ("true" if value else "false"), _ATOM_PREC
        case Var(name):
            return name, _ATOM_PREC
        case Hole(index):
            return f"?{index}", _ATOM_PREC
        case Lambda(params, body):
            return f"lambda ({', '.join(params)}) {_render(body, 0, compose_name)}", 0
        case If(cond, then_branch, else_branch):
            return (
                f"if {_render(cond, 0, compose_name)} then {_render(then_branch, 0, compose_name)}"
                f" else {_render(else_branch, 0, compose_name)}",
                0,
            )
    head, args = unfold_apply(e)
    if isinstance(head, Var) and len(args) == 2:
        if head.name == compose_name:
            left = _render(args[0], _COMPOSE_PREC + 1, compose_name)
            right = _render(args[1], _COMPOSE_PREC, compose_name)
            return f"{left}.{right}", _COMPOSE_PREC
        if head.name in INFIX_OPERATORS:
            prec, assoc = INFIX_OPERATORS[head.name]
            left_ctx = prec if assoc == "left" else prec + 1
            right_ctx = prec if assoc == "right" else prec + 1
            left = _render(args[0], left_ctx, compose_name)
            right = _render(args[1], right_ctx, compose_name)
            return f"{left} {head.name} {right}", prec
    if isinstance(head, Var) and head.name in INFIX_OPERATORS:
        # partially applied operator, only reachable for hand-built trees
        pieces = [f"({head.name})"] + [_render(a, _ATOM_PREC, compose_name) for a in args]
        return " ".join(pieces), _APPLY_PREC
    pieces = [_render(head, _APPLY_PREC, compose_name)] + [_render(a, _ATOM_PREC, compose_name) for a in args]
    return " ".join(pieces), _APPLY_PREC


def render_program(p: InducedProgram, compose_name: str = COMPOSE_NAME) -> str:
    """One `name = body` line per function, dependencies first and target last."""
    if not p.is_complete():
        missing = [f.name for f in p.functions if f.holes]
        raise RenderError(f"cannot render an incomplete program (functions with holes: {missing})")
    lines = []
    for name in p.dependency_order():
        function = p.get(name)
        lines.append(f"{name} = {render_expr(function.body, compose_name)}")
    return "\n".join(lines)
