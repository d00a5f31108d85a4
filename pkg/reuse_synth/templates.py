from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from loguru import logger

from reuse_synth.errors import TemplateError
from reuse_synth.syntax import Definition, Expression, Hole, Lambda, Var, apply_all
from reuse_synth.typesystem import (
    FreshSource,
    Type,
    TypeScheme,
    TVar,
    apply_type,
    arrow_args,
    ftv,
    infer_definition,
)

IDENTITY_NAME = "identity"


class Classification(str, Enum):
    LINEAR = "linear"
    BRANCHING = "branching"


@dataclass(frozen=True)
class Template:
    name: str
    combinator_scheme: TypeScheme
    hole_count: int
    hole_arg_types: tuple[Type, ...]
    classification: Classification

    @property
    def is_identity(self) -> bool:
        return self.hole_count == 1 and self.name == IDENTITY_NAME and not self.hole_arg_types


def classify(hole_arg_types: tuple[Type, ...]) -> Classification:
    """Linear when no two functional inputs share a type variable."""
    seen: set[str] = set()
    for t in hole_arg_types:
        names = ftv(t)
        if names & seen:
            return Classification.BRANCHING
        seen |= names
    return Classification.LINEAR


def build_template(definition: Definition, env: Mapping[str, TypeScheme | Type], fresh: FreshSource | None = None) -> Template:
    """Infer a combinator's scheme and read its hole types off the leading arrows."""
    fresh = fresh or FreshSource()
    if not isinstance(definition.body, Lambda):
        raise TemplateError(f"line {definition.line}: combinator {definition.name} takes no parameters")
    scheme = infer_definition(env, definition, fresh)
    if scheme is None:
        raise TemplateError(f"line {definition.line}: combinator {definition.name} does not type check")
    hole_count = len(definition.body.params)
    args = arrow_args(scheme.body)
    if len(args) < hole_count:
        raise TemplateError(
            f"line {definition.line}: combinator {definition.name} has {hole_count} parameters "
            f"but its type {scheme} only takes {len(args)} arguments"
        )
    hole_arg_types = tuple(args[:hole_count])
    template = Template(definition.name, scheme, hole_count, hole_arg_types, classify(hole_arg_types))
    logger.debug(f"Template {template.name}: {scheme} ({template.classification.value}, {hole_count} holes)")
    return template


def identity_template() -> Template:
    """The bare-hole template, whose body is the filler itself."""
    a = TVar("a")
    return Template(IDENTITY_NAME, TypeScheme(frozenset({"a"}), a), 1, (), Classification.LINEAR)


@dataclass(frozen=True, slots=True)
class Instance:
    body: Expression
    body_type: Type
    hole_types: dict[int, Type]


def instantiate_template(template: Template, first_hole: int, fresh: FreshSource) -> Instance:
    """`comb ?k ?k+1 ...` with fresh hole indices starting at first_hole and fresh type variables."""
    if template.is_identity:
        t = fresh.var()
        return Instance(Hole(first_hole), t, {first_hole: t})
    mapping = {name: fresh.var() for name in sorted(template.combinator_scheme.quantified)}
    holes = [Hole(first_hole + i) for i in range(template.hole_count)]
    body_type = apply_type(mapping, template.combinator_scheme.body)
    hole_types = {}
    for hole in holes:
        hole_types[hole.index] = body_type.frm
        body_type = body_type.to
    return Instance(apply_all(Var(template.name), *holes), body_type, hole_types)
