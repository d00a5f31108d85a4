"""Types, substitutions, unification and algorithm W with holes.

Unification failure is an ordinary result (``None``) because the search
uses it to prune candidates; only an unbound identifier raises.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from reuse_synth.errors import UnboundNameError
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


@dataclass(frozen=True, slots=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class TInt:
    def __str__(self) -> str:
        return "Int"


@dataclass(frozen=True, slots=True)
class TChar:
    def __str__(self) -> str:
        return "Char"


@dataclass(frozen=True, slots=True)
class TBool:
    def __str__(self) -> str:
        return "Bool"


@dataclass(frozen=True, slots=True)
class TList:
    elem: Type

    def __str__(self) -> str:
        return f"[{self.elem}]"


@dataclass(frozen=True, slots=True)
class TArrow:
    frm: Type
    to: Type

    def __str__(self) -> str:
        left = f"({self.frm})" if isinstance(self.frm, TArrow) else str(self.frm)
        return f"{left} -> {self.to}"


Type = Union[TVar, TInt, TChar, TBool, TList, TArrow]
Substitution = dict[str, Type]

INT = TInt()
CHAR = TChar()
BOOL = TBool()


@dataclass(frozen=True, slots=True)
class TypeScheme:
    quantified: frozenset[str]
    body: Type

    def __str__(self) -> str:
        if not self.quantified:
            return str(self.body)
        return f"forall {' '.join(sorted(self.quantified))}. {self.body}"


# invented functions sit in the environment unquantified
TypingEnvironment = dict[str, Union[TypeScheme, Type]]


def arrow(*types: Type) -> Type:
    """arrow(a, b, c) is a -> b -> c."""
    result = types[-1]
    for t in reversed(types[:-1]):
        result = TArrow(t, result)
    return result


def arrow_args(t: Type) -> list[Type]:
    args = []
    while isinstance(t, TArrow):
        args.append(t.frm)
        t = t.to
    return args


class FreshSource:
    """Hands out unused type-variable names.  User-written variables carry a leading quote."""

    __slots__ = ("counter",)

    def __init__(self, start: int = 0):
        self.counter = start

    def var(self) -> TVar:
        self.counter += 1
        return TVar(f"t{self.counter}")


def ftv(t: Type | TypeScheme) -> set[str]:
    match t:
        case TVar(name):
            return {name}
        case TList(elem):
            return ftv(elem)
        case TArrow(frm, to):
            return ftv(frm) | ftv(to)
        case TypeScheme(quantified, body):
            return ftv(body) - quantified
        case _:
            return set()


def ftv_env(env: Mapping[str, TypeScheme | Type]) -> set[str]:
    out: set[str] = set()
    for entry in env.values():
        out |= ftv(entry)
    return out


def apply_type(s: Mapping[str, Type], t: Type) -> Type:
    if not s:
        return t
    match t:
        case TVar(name):
            return s.get(name, t)
        case TList(elem):
            return TList(apply_type(s, elem))
        case TArrow(frm, to):
            return TArrow(apply_type(s, frm), apply_type(s, to))
        case _:
            return t


def apply_scheme(s: Mapping[str, Type], scheme: TypeScheme) -> TypeScheme:
    inner = {k: v for k, v in s.items() if k not in scheme.quantified}
    return TypeScheme(scheme.quantified, apply_type(inner, scheme.body))


def apply_subst(s: Mapping[str, Type], target):
    """Apply s to a type, a scheme or a whole typing environment."""
    if isinstance(target, TypeScheme):
        return apply_scheme(s, target)
    if isinstance(target, dict):
        if not s:
            return dict(target)
        return {
            name: apply_scheme(s, entry) if isinstance(entry, TypeScheme) else apply_type(s, entry)
            for name, entry in target.items()
        }
    return apply_type(s, target)


def compose(s2: Mapping[str, Type], s1: Mapping[str, Type]) -> Substitution:
    """The substitution that applies s1 first and then s2."""
    out = {name: apply_type(s2, t) for name, t in s1.items()}
    for name, t in s2.items():
        out.setdefault(name, t)
    return out


def _occurs(name: str, t: Type) -> bool:
    match t:
        case TVar(other):
            return other == name
        case TList(elem):
            return _occurs(name, elem)
        case TArrow(frm, to):
            return _occurs(name, frm) or _occurs(name, to)
        case _:
            return False


def _bind(name: str, t: Type) -> Substitution | None:
    if isinstance(t, TVar) and t.name == name:
        return {}
    if _occurs(name, t):
        return None
    return {name: t}


def unify(t1: Type, t2: Type) -> Substitution | None:
    """Most general unifier of t1 and t2, or None on a clash or an occurs-check failure."""
    match t1, t2:
        case TVar(name), _:
            return _bind(name, t2)
        case _, TVar(name):
            return _bind(name, t1)
        case TList(a), TList(b):
            return unify(a, b)
        case TArrow(a1, b1), TArrow(a2, b2):
            s1 = unify(a1, a2)
            if s1 is None:
                return None
            s2 = unify(apply_type(s1, b1), apply_type(s1, b2))
            if s2 is None:
                return None
            return compose(s2, s1)
        case _:
            return {} if t1 == t2 else None


def generalize(env: Mapping[str, TypeScheme | Type] | Scope, t: Type) -> TypeScheme:
    free = env.free_vars() if isinstance(env, Scope) else ftv_env(env)
    return TypeScheme(frozenset(ftv(t) - free), t)


class Scope:
    """A typing environment split into closed schemes and local bindings.

    Substitutions never touch a closed scheme, so only the local part is
    rewritten and scanned for free variables.
    """

    __slots__ = ("closed", "local")

    def __init__(self, closed: Mapping[str, TypeScheme], local: dict[str, TypeScheme | Type] | None = None):
        self.closed = closed
        self.local = local if local is not None else {}

    @classmethod
    def of(cls, env: Mapping[str, TypeScheme | Type] | Scope) -> Scope:
        if isinstance(env, Scope):
            return env
        closed: dict[str, TypeScheme] = {}
        local: dict[str, TypeScheme | Type] = {}
        for name, entry in env.items():
            if isinstance(entry, TypeScheme) and not ftv(entry):
                closed[name] = entry
            else:
                local[name] = entry
        return cls(closed, local)

    def __contains__(self, name: str) -> bool:
        return name in self.local or name in self.closed

    def __getitem__(self, name: str) -> TypeScheme | Type:
        if name in self.local:
            return self.local[name]
        return self.closed[name]

    def bind(self, bindings: Mapping[str, TypeScheme | Type]) -> Scope:
        return Scope(self.closed, {**self.local, **bindings})

    def substituted(self, s: Mapping[str, Type]) -> Scope:
        if not s or not self.local:
            return self
        return Scope(self.closed, apply_subst(s, self.local))

    def free_vars(self) -> set[str]:
        return ftv_env(self.local)


def instantiate(scheme: TypeScheme | Type, fresh: FreshSource) -> Type:
    if not isinstance(scheme, TypeScheme):
        return scheme
    if not scheme.quantified:
        return scheme.body
    mapping = {name: fresh.var() for name in sorted(scheme.quantified)}
    return apply_type(mapping, scheme.body)


def normalize(t: Type) -> Type:
    """Rename variables to a, b, c, ... in order of appearance, for display and comparison."""
    names: dict[str, Type] = {}
    for name in _ordered_vars(t):
        if name not in names:
            names[name] = TVar(_letter(len(names)))
    return apply_type(names, t)


def _ordered_vars(t: Type) -> list[str]:
    match t:
        case TVar(name):
            return [name]
        case TList(elem):
            return _ordered_vars(elem)
        case TArrow(frm, to):
            return _ordered_vars(frm) + _ordered_vars(to)
        case _:
            return []


def _letter(i: int) -> str:
    return "abcdefghijklmnopqrstuvwxyz"[i % 26] + ("" if i < 26 else str(i // 26))


def primitive_schemes() -> dict[str, TypeScheme]:
    a = TVar("a")
    poly = frozenset({"a"})
    mono = frozenset()
    return {
        "+": TypeScheme(mono, arrow(INT, INT, INT)),
        "-": TypeScheme(mono, arrow(INT, INT, INT)),
        "*": TypeScheme(mono, arrow(INT, INT, INT)),
        "=": TypeScheme(poly, arrow(a, a, BOOL)),
        "<": TypeScheme(mono, arrow(INT, INT, BOOL)),
        "not": TypeScheme(mono, arrow(BOOL, BOOL)),
        "head": TypeScheme(poly, arrow(TList(a), a)),
        "tail": TypeScheme(poly, arrow(TList(a), TList(a))),
        "nil": TypeScheme(poly, TList(a)),
        ":": TypeScheme(poly, arrow(a, TList(a), TList(a))),
        "append": TypeScheme(poly, arrow(TList(a), TList(a), TList(a))),
        "isUpper": TypeScheme(mono, arrow(CHAR, BOOL)),
        "isAlpha": TypeScheme(mono, arrow(CHAR, BOOL)),
        "isNum": TypeScheme(mono, arrow(CHAR, BOOL)),
    }



@dataclass(slots=True)
class Inference:
    type: Type
    subst: Substitution
    hole_types: dict[int, Type]


def infer_expr(
    env: Mapping[str, TypeScheme | Type] | Scope,
    e: Expression,
    fresh: FreshSource | None = None,
) -> Inference | None:
    """Algorithm W extended with holes.

    Every hole gets a fresh type variable; the returned hole map carries the
    final substitution so each entry is the most constrained type found.
    Returns None when some unification fails.
    """
    fresh = fresh or FreshSource()
    holes: dict[int, Type] = {}
    result = _infer(Scope.of(env), e, fresh, holes)
    if result is None:
        return None
    subst, t = result
    return Inference(t, subst, {i: apply_type(subst, h) for i, h in holes.items()})


def _infer(scope: Scope, e: Expression, fresh: FreshSource, holes: dict[int, Type]) -> tuple[Substitution, Type] | None:
    match e:
        case NumLit():
            return {}, INT
        case CharLit():
            return {}, CHAR
        case BoolLit():
            return {}, BOOL
        case Hole(index):
            t = fresh.var()
            holes[index] = t
            return {}, t
        case Var(name):
            if name not in scope:
                raise UnboundNameError(name)
            return {}, instantiate(scope[name], fresh)
        case Lambda(params, body):
            param_types = [fresh.var() for _ in params]
            result = _infer(scope.bind(dict(zip(params, param_types))), body, fresh, holes)
            if result is None:
                return None
            s, body_type = result
            return s, apply_type(s, arrow(*param_types, body_type))
        case Apply(fn, arg):
            out = fresh.var()
            r1 = _infer(scope, fn, fresh, holes)
            if r1 is None:
                return None
            s1, fn_type = r1
            r2 = _infer(scope.substituted(s1), arg, fresh, holes)
            if r2 is None:
                return None
            s2, arg_type = r2
            s3 = unify(apply_type(s2, fn_type), TArrow(arg_type, out))
            if s3 is None:
                return None
            return compose(s3, compose(s2, s1)), apply_type(s3, out)
        case If(cond, then_branch, else_branch):
            r1 = _infer(scope, cond, fresh, holes)
            if r1 is None:
                return None
            s, cond_type = r1
            s_bool = unify(cond_type, BOOL)
            if s_bool is None:
                return None
            s = compose(s_bool, s)
            r2 = _infer(scope.substituted(s), then_branch, fresh, holes)
            if r2 is None:
                return None
            s = compose(r2[0], s)
            r3 = _infer(scope.substituted(s), else_branch, fresh, holes)
            if r3 is None:
                return None
            s = compose(r3[0], s)
            s_branch = unify(apply_type(s, r2[1]), apply_type(s, r3[1]))
            if s_branch is None:
                return None
            s = compose(s_branch, s)
            return s, apply_type(s, r3[1])
    raise TypeError(f"not an expression: {e!r}")


def infer_definition(
    env: Mapping[str, TypeScheme | Type] | Scope,
    definition: Definition,
    fresh: FreshSource,
) -> TypeScheme | None:
    """Infer and generalize one val/rec definition; recursion is monomorphic."""
    scope = Scope.of(env)
    self_type = None
    if isinstance(definition, RecDef):
        self_type = fresh.var()
        scope = scope.bind({definition.name: self_type})
    result = infer_expr(scope, definition.body, fresh)
    if result is None:
        return None
    t = result.type
    s = result.subst
    if self_type is not None:
        s_rec = unify(apply_type(s, self_type), t)
        if s_rec is None:
            return None
        s = compose(s_rec, s)
        t = apply_type(s_rec, t)
    return generalize(Scope.of(env).substituted(s), t)


def infer_program(
    env: Mapping[str, TypeScheme | Type] | Scope,
    program: InducedProgram,
    order: list[str] | None = None,
    fresh: FreshSource | None = None,
) -> TypingEnvironment | None:
    """Type a complete induced program, generalizing each function before its users see it.

    Generalizing at definition boundaries lets one invented function be used
    at several types, which the reuse solutions need.
    """
    fresh = fresh or FreshSource()
    order = order if order is not None else program.dependency_order()
    scope = Scope.of(env)
    closed = dict(scope.closed)
    local = dict(scope.local)
    for name in order:
        function = program.get(name)
        current = Scope(closed, local)
        result = infer_expr(current, function.body, fresh)
        if result is None:
            return None
        scheme = generalize(current, result.type)
        if ftv(scheme):
            local[name] = scheme
        else:
            closed[name] = scheme
    return {**closed, **local}
