"""Program states, the specialize/define rules and iterative deepening over them.

Both algorithms share one expand order:

* while some function has a hole, fill the first one (earliest invented
  function, lowest hole index) with every legal filler: background functions
  in file order, then earlier inventions when reuse is on, then one fresh name;
* otherwise define the oldest invented-but-undefined function with every
  template in file order (identity last, when enabled).

A_linear threads a typing environment through those steps and drops any
successor whose types fail to unify.  A_branching ignores types until `check`
and then runs ordinary inference over the finished program.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Iterator, Mapping

from loguru import logger

from reuse_synth.errors import KnowledgeError, LoadError, UnboundNameError
from reuse_synth.graph import DependencyGraph
from reuse_synth.interpreter import (
    DEFAULT_FUEL,
    Budget,
    EvalFailure,
    RuntimeEnvironment,
    Value,
    base_environment,
    eval_application,
    eval_expr,
    is_first_order,
    load_program,
)
from reuse_synth.parser import Knowledge
from reuse_synth.syntax import (
    TARGET_NAME,
    Definition,
    InducedFunction,
    InducedProgram,
    Lambda,
    Var,
    fill_hole,
    free_names,
    is_invented_name,
)
from reuse_synth.templates import Template, build_template, identity_template, instantiate_template
from reuse_synth.typesystem import (
    FreshSource,
    Scope,
    TArrow,
    Type,
    TypeScheme,
    apply_type,
    infer_definition,
    infer_expr,
    infer_program,
    instantiate,
    primitive_schemes,
    unify,
)


class Algorithm(str, Enum):
    LINEAR = "linear"
    BRANCHING = "branching"


class Outcome(str, Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class SearchConfig:
    algorithm: Algorithm = Algorithm.BRANCHING
    reuse: bool = True
    max_depth: int = 8
    target_type_pruning: bool = True
    fuel: int = DEFAULT_FUEL
    identity_template: bool = False

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be at least 1, got {self.max_depth}")
        if self.fuel < 1:
            raise ValueError(f"fuel must be at least 1, got {self.fuel}")
        if not isinstance(self.algorithm, Algorithm):
            object.__setattr__(self, "algorithm", Algorithm(self.algorithm))

    @property
    def linear(self) -> bool:
        return self.algorithm is Algorithm.LINEAR


@dataclass(frozen=True)
class ExampleSet:
    positives: tuple[tuple[Value, Value], ...]
    negatives: tuple[tuple[Value, Value], ...]
    goal_type: Type

    def __post_init__(self):
        if not self.positives:
            raise KnowledgeError("at least one positive example is required")


@dataclass(frozen=True)
class SearchContext:
    """Read-only search inputs: templates and background functions with their types."""

    templates: tuple[Template, ...]
    background: tuple[str, ...]
    type_env: dict[str, TypeScheme]
    runtime_env: RuntimeEnvironment
    goal_type: Type

    @cached_property
    def type_scope(self) -> Scope:
        return Scope.of(self.type_env)

    @classmethod
    def build(cls, knowledge: Knowledge, config: SearchConfig) -> SearchContext:
        definitions: list[Definition] = sorted(knowledge.templates + knowledge.background, key=lambda d: d.line)
        type_env: dict[str, TypeScheme] = primitive_schemes()
        fresh = FreshSource()
        for definition in definitions:
            try:
                scheme = infer_definition(type_env, definition, fresh)
            except UnboundNameError as err:
                raise KnowledgeError(f"line {definition.line}: {definition.name} mentions unbound {err.name}") from err
            if scheme is None:
                raise KnowledgeError(f"line {definition.line}: {definition.name} does not type check")
            type_env[definition.name] = scheme
            logger.debug(f"{definition.name} : {scheme}")
        templates = [build_template(t, type_env, fresh) for t in knowledge.templates]
        if config.identity_template:
            templates.append(identity_template())
        runtime_env = base_environment(definitions, Budget(config.fuel))
        goal = knowledge.goal
        return cls(
            tuple(templates),
            tuple(b.name for b in knowledge.background),
            type_env,
            runtime_env,
            TArrow(goal.input_type, goal.output_type),
        )


def build_examples(knowledge: Knowledge, context: SearchContext, fuel: int = DEFAULT_FUEL) -> ExampleSet:
    """Type-check example literals against the goal and evaluate them before the search starts."""
    fresh = FreshSource()

    def typed(decl) -> None:
        try:
            inputs = infer_expr(context.type_scope, decl.input, fresh)
            outputs = infer_expr(context.type_scope, decl.output, fresh)
        except UnboundNameError as err:
            raise KnowledgeError(f"line {decl.line}: example mentions unbound {err.name}") from err
        if inputs is None or outputs is None:
            raise KnowledgeError(f"line {decl.line}: example does not type check")
        found = TArrow(inputs.type, outputs.type)
        if unify(found, context.goal_type) is None:
            raise KnowledgeError(f"line {decl.line}: example of type {found} does not fit the goal {context.goal_type}")

    def ground(decl, expr) -> Value:
        if isinstance(expr, Lambda) or any(is_invented_name(n) for n in free_names(expr)):
            raise KnowledgeError(f"line {decl.line}: examples must be ground values")
        value = eval_expr(context.runtime_env, expr, Budget(fuel))
        if isinstance(value, EvalFailure):
            raise KnowledgeError(f"line {decl.line}: cannot evaluate example: {value.reason}")
        if not is_first_order(value):
            raise KnowledgeError(f"line {decl.line}: examples must be ground values, got {value}")
        return value

    def pair(decl) -> tuple[Value, Value]:
        example = (ground(decl, decl.input), ground(decl, decl.output))
        typed(decl)
        return example

    positives = tuple(pair(d) for d in knowledge.positives)
    negatives = tuple(pair(d) for d in knowledge.negatives)
    return ExampleSet(positives, negatives, context.goal_type)


@dataclass(frozen=True)
class Counters:
    name: int = 2
    hole: int = 1
    tvar: int = 0


@dataclass(frozen=True)
class ProgramState:
    program: InducedProgram
    graph: DependencyGraph
    queue: tuple[str, ...]
    invented: tuple[str, ...]
    counters: Counters = field(default_factory=Counters)
    # only A_linear keeps types: invented names -> unquantified type, open holes -> type
    env: dict[str, Type] | None = None
    hole_types: dict[int, Type] | None = None

    @property
    def depth(self) -> int:
        return len(self.invented)

    def first_hole(self) -> tuple[str, int] | None:
        for name in self.invented:
            function = self.program.get(name)
            if function is not None:
                holes = function.holes
                if holes:
                    return name, min(holes)
        return None

    def replace_function(self, function: InducedFunction) -> InducedProgram:
        functions = tuple(function if f.name == function.name else f for f in self.program.functions)
        return replace(self.program, functions=functions)


def initial_state(context: SearchContext, config: SearchConfig) -> ProgramState:
    """Empty program with the target pre-invented and waiting for a definition."""
    env = None
    hole_types = None
    counters = Counters()
    if config.linear:
        fresh = FreshSource(counters.tvar)
        env = {TARGET_NAME: fresh.var()}
        hole_types = {}
        counters = replace(counters, tvar=fresh.counter)
    return ProgramState(
        program=InducedProgram((), TARGET_NAME),
        graph=DependencyGraph([TARGET_NAME]),
        queue=(TARGET_NAME,),
        invented=(TARGET_NAME,),
        counters=counters,
        env=env,
        hole_types=hole_types,
    )


def _substituted(s: Mapping[str, Type], types: dict, skip=None) -> dict:
    return {k: apply_type(s, t) for k, t in types.items() if k != skip}


def specialize(state: ProgramState, context: SearchContext, config: SearchConfig) -> list[ProgramState]:
    """Fill the first hole in every legal way."""
    selected = state.first_hole()
    if selected is None:
        return []
    name, index = selected
    function = state.program.get(name)
    fresh = FreshSource(state.counters.tvar)
    successors: list[ProgramState] = []

    def successor(
        filler: str,
        filler_type: Type | None,
        graph: DependencyGraph,
        env: dict[str, Type] | None = state.env,
        queue: tuple[str, ...] = state.queue,
        invented: tuple[str, ...] = state.invented,
        next_name: int = state.counters.name,
    ) -> None:
        hole_types = state.hole_types
        if config.linear:
            s = unify(hole_types[index], filler_type)
            if s is None:
                logger.trace(f"{filler} does not fit ?{index} in {name}")
                return
            env = _substituted(s, env)
            hole_types = _substituted(s, hole_types, skip=index)
        body = fill_hole(function.body, index, Var(filler))
        successors.append(
            replace(
                state,
                program=state.replace_function(replace(function, body=body)),
                graph=graph,
                queue=queue,
                invented=invented,
                env=env,
                hole_types=hole_types,
                counters=replace(state.counters, name=next_name, tvar=fresh.counter),
            )
        )

    for bk in context.background:
        filler_type = instantiate(context.type_env[bk], fresh) if config.linear else None
        successor(bk, filler_type, state.graph)

    if config.reuse:
        for invented in state.invented:
            if invented == name or state.graph.uses(invented, name):
                continue
            filler_type = state.env[invented] if config.linear else None
            successor(invented, filler_type, state.graph.with_edge(name, invented))

    new_name = f"g{state.counters.name}"
    env = state.env
    filler_type = None
    if config.linear:
        filler_type = fresh.var()
        env = {**state.env, new_name: filler_type}
    successor(
        new_name,
        filler_type,
        state.graph.with_edge(name, new_name),
        env=env,
        queue=state.queue + (new_name,),
        invented=state.invented + (new_name,),
        next_name=state.counters.name + 1,
    )
    return successors


def define(state: ProgramState, context: SearchContext, config: SearchConfig) -> list[ProgramState]:
    """Give the oldest undefined function a body, once per template."""
    if not state.queue:
        return []
    name = state.queue[0]
    successors: list[ProgramState] = []
    for template in context.templates:
        fresh = FreshSource(state.counters.tvar)
        instance = instantiate_template(template, state.counters.hole, fresh)
        env = state.env
        hole_types = state.hole_types
        if config.linear:
            s = unify(instance.body_type, state.env[name])
            if s is None:
                logger.trace(f"template {template.name} disagrees with the type of {name}")
                continue
            env = _substituted(s, state.env)
            hole_types = {**_substituted(s, state.hole_types), **_substituted(s, instance.hole_types)}
        function = InducedFunction(name, instance.body, template.name)
        successors.append(
            replace(
                state,
                program=replace(state.program, functions=state.program.functions + (function,)),
                queue=state.queue[1:],
                env=env,
                hole_types=hole_types,
                counters=replace(
                    state.counters,
                    hole=state.counters.hole + template.hole_count,
                    tvar=fresh.counter,
                ),
            )
        )
    return successors


def expand(state: ProgramState, context: SearchContext, config: SearchConfig) -> list[ProgramState]:
    if state.first_hole() is not None:
        successors = specialize(state, context, config)
    elif state.queue:
        successors = define(state, context, config)
    else:
        return []
    if config.linear and config.target_type_pruning:
        successors = [s for s in successors if unify(s.env[TARGET_NAME], context.goal_type) is not None]
    return successors


def check(state: ProgramState, examples: ExampleSet, context: SearchContext, config: SearchConfig) -> bool:
    """True when the state is a finished, well typed program that satisfies the examples."""
    program = state.program
    if state.queue or not program.is_complete():
        return False
    order = state.graph.definition_order()
    fresh = FreshSource(state.counters.tvar)
    if config.linear:
        target_type = state.env[TARGET_NAME]
    else:
        env = infer_program(context.type_scope, program, order, fresh)
        if env is None:
            return False
        target_type = instantiate(env[TARGET_NAME], fresh)
    if unify(target_type, examples.goal_type) is None:
        return False
    try:
        runtime = load_program(context.runtime_env, program, order, Budget(config.fuel))
    except LoadError as err:
        logger.debug(f"rejecting candidate: {err}")
        return False
    target = runtime[program.target_name]
    for example_in, example_out in examples.positives:
        result = eval_application(target, example_in, Budget(config.fuel))
        if isinstance(result, EvalFailure) or result != example_out:
            return False
    for example_in, example_out in examples.negatives:
        result = eval_application(target, example_in, Budget(config.fuel))
        if isinstance(result, EvalFailure) or result == example_out:
            return False
    return True


@dataclass(frozen=True)
class SearchResult:
    program: InducedProgram | None
    outcome: Outcome
    states_visited: int
    depth_reached: int

    @property
    def function_count(self) -> int:
        return len(self.program.functions) if self.program is not None else 0


def prog_search(
    config: SearchConfig,
    context: SearchContext,
    examples: ExampleSet,
    deadline: float | None = None,
) -> SearchResult:
    """Iterative deepening on the number of invented functions.

    Depth d explores, depth first in expand order, every state with at most d
    invented names, so the first program found has as few functions as any
    solution can have.  `deadline` is a `time.perf_counter()` value.
    """
    visited = 0
    root = initial_state(context, config)
    for depth in range(1, config.max_depth + 1):
        logger.debug(f"Searching with at most {depth} invented functions")
        stack = [root]
        while stack:
            state = stack.pop()
            visited += 1
            if deadline is not None and visited % 512 == 0 and time.perf_counter() > deadline:
                logger.warning(f"Search timed out at depth {depth} after {visited} states")
                return SearchResult(None, Outcome.TIMEOUT, visited, depth)
            if check(state, examples, context, config):
                logger.success(f"Found a {len(state.program.functions)}-function program at depth {depth}")
                return SearchResult(state.program, Outcome.SOLVED, visited, depth)
            successors = [s for s in expand(state, context, config) if s.depth <= depth]
            stack.extend(reversed(successors))
    logger.warning(f"No program with at most {config.max_depth} functions satisfies the examples")
    return SearchResult(None, Outcome.EXHAUSTED, visited, config.max_depth)


def enumerate_states(context: SearchContext, config: SearchConfig, depth: int) -> Iterator[ProgramState]:
    """Every state the expand relation reaches with at most `depth` invented functions, in search order."""
    stack = [initial_state(context, config)]
    while stack:
        state = stack.pop()
        yield state
        stack.extend(reversed([s for s in expand(state, context, config) if s.depth <= depth]))
