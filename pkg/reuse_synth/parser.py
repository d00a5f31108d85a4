"""Lexer and recursive-descent parser for synthesis problem files.

A file is a sequence of `;;`-terminated declarations::

    val comp(f, g) = lambda (x) f(g(x)) ;;
    val BK_addOne(x) = x + 1 ;;
    PEx (1) => 9 ;;
    NEx (1) => 2 ;;
    Synthesize (Int) => Int;;

Definitions whose names start with ``BK_`` are background functions, every
other definition is a template combinator.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from loguru import logger

from reuse_synth.errors import KnowledgeError, LexError, ParseError
from reuse_synth.syntax import (
    COMPOSE_NAME,
    Apply,
    BoolLit,
    CharLit,
    Declaration,
    Definition,
    Expression,
    If,
    Lambda,
    NegExample,
    NumLit,
    PosExample,
    RecDef,
    SynthesizeGoal,
    ValDef,
    Var,
    apply_all,
    is_invented_name,
)
from reuse_synth.typesystem import BOOL, CHAR, INT, TArrow, TList, TVar, Type

KEYWORDS = frozenset(
    {"val", "rec", "lambda", "if", "then", "else", "PEx", "NEx", "Synthesize", "true", "false", "nil"}
)
# longest first so that `=>` wins over `=` and `;;` is a single token
PUNCTUATION = ("=>", "->", ";;", "(", ")", "[", "]", ",", ":", "=", "+", "-", "*", "<", ".")
BK_PREFIX = "BK_"
_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'"}
_SECTIONS = frozenset({"+", "-", "*", "<", "=", ":"})


class Token(NamedTuple):
    kind: str  # "kw", "ident", "num", "char", "punct"
    value: str
    line: int

    def __repr__(self) -> str:
        return f"{self.kind}:{self.value}"


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    n = len(src)
    while i < n:
        c = src[i]
        if c == "\n":
            line += 1
            i += 1
        elif c.isspace():
            i += 1
        elif src.startswith("--", i):
            while i < n and src[i] != "\n":
                i += 1
        elif c.isdigit():
            start = i
            while i < n and src[i].isdigit():
                i += 1
            tokens.append(Token("num", src[start:i], line))
        elif c.isalpha() or c == "_":
            start = i
            while i < n and (src[i].isalnum() or src[i] in "_'"):
                i += 1
            word = src[start:i]
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, line))
        elif c == "'":
            value, i = _char_literal(src, i, line)
            tokens.append(Token("char", value, line))
        else:
            for p in PUNCTUATION:
                if src.startswith(p, i):
                    tokens.append(Token("punct", p, line))
                    i += len(p)
                    break
            else:
                raise LexError(line, f"unexpected character {c!r}")
    return tokens


def _char_literal(src: str, i: int, line: int) -> tuple[str, int]:
    # src[i] is the opening quote
    if i + 1 >= len(src):
        raise LexError(line, "unterminated character literal")
    c = src[i + 1]
    end = i + 2
    if c == "\\":
        if i + 2 >= len(src) or src[i + 2] not in _ESCAPES:
            raise LexError(line, "bad escape in character literal")
        c = _ESCAPES[src[i + 2]]
        end = i + 3
    elif c in "\n'":
        raise LexError(line, "empty character literal")
    if end >= len(src) or src[end] != "'":
        raise LexError(line, "unterminated character literal")
    return c, end + 1


@dataclass(frozen=True)
class SourceFile:
    declarations: tuple[Declaration, ...]
    path: str = "<string>"


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # token helpers

    def peek(self, offset: int = 0) -> Token | None:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def line(self) -> int:
        tok = self.peek()
        if tok is not None:
            return tok.line
        return self.tokens[-1].line if self.tokens else 1

    def at(self, value: str, kind: str | None = None) -> bool:
        tok = self.peek()
        return tok is not None and tok.value == value and (kind is None or tok.kind == kind)

    def accept(self, value: str) -> bool:
        if self.at(value) and self.peek().kind in ("punct", "kw"):
            self.pos += 1
            return True
        return False

    def expect(self, value: str) -> Token:
        tok = self.peek()
        if tok is None or tok.value != value or tok.kind not in ("punct", "kw"):
            found = "end of input" if tok is None else repr(tok.value)
            raise ParseError(self.line(), f"expected {value!r}, found {found}")
        self.pos += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if tok is None or tok.kind != "ident":
            found = "end of input" if tok is None else repr(tok.value)
            raise ParseError(self.line(), f"expected an identifier, found {found}")
        self.pos += 1
        return tok.value

    # declarations

    def declarations(self) -> list[Declaration]:
        decls = []
        while self.peek() is not None:
            decls.append(self.declaration())
        return decls

    def declaration(self) -> Declaration:
        line = self.line()
        if self.accept("val") or self.at("rec"):
            recursive = self.accept("rec")
            name = self.ident()
            params = self.params() if self.at("(") else ()
            self.expect("=")
            body = self.expression()
            self.expect(";;")
            if params:
                body = Lambda(params, body)
            return RecDef(name, body, line) if recursive else ValDef(name, body, line)
        if self.at("PEx") or self.at("NEx"):
            positive = self.peek().value == "PEx"
            self.pos += 1
            example_in = self.expression()
            self.expect("=>")
            example_out = self.expression()
            self.expect(";;")
            if positive:
                return PosExample(example_in, example_out, line)
            return NegExample(example_in, example_out, line)
        if self.accept("Synthesize"):
            input_type = self.type_expr()
            self.expect("=>")
            output_type = self.type_expr()
            self.expect(";;")
            return SynthesizeGoal(input_type, output_type, line)
        raise ParseError(line, f"expected a declaration, found {self.peek().value!r}")

    def params(self) -> tuple[str, ...]:
        self.expect("(")
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        self.expect(")")
        if len(set(names)) != len(names):
            raise ParseError(self.line(), f"duplicate parameter in {names}")
        return tuple(names)

    # types

    def type_expr(self) -> Type:
        left = self.type_atom()
        if self.accept("->"):
            return TArrow(left, self.type_expr())
        return left

    def type_atom(self) -> Type:
        if self.accept("("):
            t = self.type_expr()
            self.expect(")")
            return t
        if self.accept("["):
            t = self.type_expr()
            self.expect("]")
            return TList(t)
        name = self.ident()
        if name == "Int":
            return INT
        if name == "Char":
            return CHAR
        if name == "Bool":
            return BOOL
        if name[0].islower():
            return TVar(f"'{name}")
        raise ParseError(self.line(), f"unknown type {name!r}")

    # expressions, loosest binding first

    def expression(self) -> Expression:
        if self.accept("lambda"):
            params = self.params()
            return Lambda(params, self.expression())
        if self.accept("if"):
            cond = self.expression()
            self.expect("then")
            then_branch = self.expression()
            self.expect("else")
            return If(cond, then_branch, self.expression())
        return self.comparison()

    def comparison(self) -> Expression:
        left = self.cons()
        for op in ("=", "<"):
            if self.accept(op):
                return apply_all(Var(op), left, self.cons())
        return left

    def cons(self) -> Expression:
        head = self.additive()
        if self.accept(":"):
            return apply_all(Var(":"), head, self.cons_tail())
        return head

    def cons_tail(self) -> Expression:
        # `x : if ...` and `x : lambda ...` are allowed on the right
        if self.at("if") or self.at("lambda"):
            return self.expression()
        return self.cons()

    def additive(self) -> Expression:
        left = self.multiplicative()
        while self.at("+") or self.at("-"):
            op = self.peek().value
            self.pos += 1
            left = apply_all(Var(op), left, self.multiplicative())
        return left

    def multiplicative(self) -> Expression:
        left = self.composition()
        while self.accept("*"):
            left = apply_all(Var("*"), left, self.composition())
        return left

    def composition(self) -> Expression:
        left = self.application()
        if self.accept("."):
            return apply_all(Var(COMPOSE_NAME), left, self.composition())
        return left

    def starts_atom(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.kind in ("ident", "num", "char"):
            return True
        if tok.kind == "kw":
            return tok.value in ("true", "false", "nil")
        return tok.value in ("(", "[")

    def application(self) -> Expression:
        fn = self.atom()
        while self.starts_atom():
            if self.at("("):
                for arg in self.argument_group():
                    fn = Apply(fn, arg)
            else:
                fn = Apply(fn, self.atom())
        return fn

    def argument_group(self) -> list[Expression]:
        self.expect("(")
        args = [self.expression()]
        while self.accept(","):
            args.append(self.expression())
        self.expect(")")
        return args

    def atom(self) -> Expression:
        tok = self.peek()
        if tok is None:
            raise ParseError(self.line(), "unexpected end of input in expression")
        if tok.kind == "num":
            self.pos += 1
            return NumLit(int(tok.value))
        if tok.kind == "char":
            self.pos += 1
            return CharLit(tok.value)
        if tok.kind == "ident":
            self.pos += 1
            return Var(tok.value)
        if self.accept("true"):
            return BoolLit(True)
        if self.accept("false"):
            return BoolLit(False)
        if self.accept("nil"):
            return Var("nil")
        if self.accept("["):
            items = []
            if not self.at("]"):
                items.append(self.expression())
                while self.accept(","):
                    items.append(self.expression())
            self.expect("]")
            result: Expression = Var("nil")
            for item in reversed(items):
                result = apply_all(Var(":"), item, result)
            return result
        if self.accept("("):
            # operator section such as (+)
            op, close = self.peek(), self.peek(1)
            if op is not None and op.kind == "punct" and op.value in _SECTIONS and close is not None and close.value == ")":
                self.pos += 2
                return Var(op.value)
            e = self.expression()
            self.expect(")")
            return e
        raise ParseError(tok.line, f"unexpected token {tok.value!r} in expression")


def parse_file(tokens: list[Token], path: str = "<string>") -> SourceFile:
    """Parse a token stream and check there is exactly one Synthesize goal."""
    declarations = _Parser(tokens).declarations()
    goals = [d for d in declarations if isinstance(d, SynthesizeGoal)]
    if not goals:
        line = tokens[-1].line if tokens else 1
        raise ParseError(line, "no Synthesize declaration")
    if len(goals) > 1:
        raise ParseError(goals[1].line, "more than one Synthesize declaration")
    return SourceFile(tuple(declarations), path)


def parse_source(src: str, path: str = "<string>") -> SourceFile:
    return parse_file(tokenize(src), path)


def read_source_file(path: str) -> SourceFile:
    with open(path, encoding="utf-8") as file:
        src = file.read()
    source = parse_source(src, path)
    logger.info(f"Parsed {len(source.declarations)} declarations from {path}")
    return source


def parse_expression(src: str) -> Expression:
    parser = _Parser(tokenize(src))
    e = parser.expression()
    if parser.peek() is not None:
        raise ParseError(parser.line(), f"trailing input {parser.peek().value!r}")
    return e


@dataclass(frozen=True)
class Knowledge:
    templates: tuple[Definition, ...]
    background: tuple[Definition, ...]
    positives: tuple[PosExample, ...]
    negatives: tuple[NegExample, ...]
    goal: SynthesizeGoal


def split_knowledge(source: SourceFile) -> Knowledge:
    """Sort declarations into templates, background functions and examples."""
    templates: list[Definition] = []
    background: list[Definition] = []
    positives: list[PosExample] = []
    negatives: list[NegExample] = []
    goal = None
    seen: set[str] = set()
    for decl in source.declarations:
        match decl:
            case ValDef(name) | RecDef(name):
                if name in seen:
                    raise KnowledgeError(f"line {decl.line}: {name} is defined twice")
                if is_invented_name(name):
                    raise KnowledgeError(f"line {decl.line}: {name} is reserved for invented functions")
                seen.add(name)
                if name.startswith(BK_PREFIX):
                    background.append(decl)
                else:
                    if not isinstance(decl.body, Lambda):
                        raise KnowledgeError(
                            f"line {decl.line}: combinator {name} needs at least one parameter to act as a template"
                        )
                    templates.append(decl)
            case PosExample():
                positives.append(decl)
            case NegExample():
                negatives.append(decl)
            case SynthesizeGoal():
                goal = decl
    if goal is None:
        raise KnowledgeError("no Synthesize declaration")
    logger.debug(
        f"Knowledge: templates={[t.name for t in templates]} background={[b.name for b in background]} "
        f"positives={len(positives)} negatives={len(negatives)}"
    )
    return Knowledge(tuple(templates), tuple(background), tuple(positives), tuple(negatives), goal)
