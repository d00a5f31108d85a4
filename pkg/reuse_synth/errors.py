from __future__ import annotations


class SynthError(Exception):
    """Base class for every user-facing failure raised by reuse_synth."""


class LexError(SynthError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ParseError(SynthError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class KnowledgeError(SynthError):
    """The file parsed but does not describe a usable synthesis problem."""


class UnboundNameError(SynthError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unbound identifier: {name}")


class TemplateError(SynthError):
    pass


class RenderError(SynthError):
    pass


class LoadError(SynthError):
    pass


class ProblemError(SynthError):
    pass
