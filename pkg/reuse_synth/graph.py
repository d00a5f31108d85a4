from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

import networkx as nx

if TYPE_CHECKING:
    from reuse_synth.syntax import InducedProgram


class CyclicDependencyError(Exception):
    pass


class DependencyGraph:
    """The "uses" relation among invented functions.

    An edge ``user -> used`` means the body of ``user`` mentions ``used``.
    The graph is kept acyclic: `with_edge` refuses an edge that would close
    a cycle.  Instances are treated as immutable once handed to a program
    state, so successors copy before mutating.
    """

    __slots__ = ("_g", "_rank")

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable[tuple[str, str]] = ()):
        self._g = nx.DiGraph()
        self._rank: dict[str, int] = {}
        for node in nodes:
            self._add_node(node)
        for user, used in edges:
            self._add_edge(user, used)

    @classmethod
    def from_program(cls, program: InducedProgram) -> DependencyGraph:
        from reuse_synth.syntax import free_names

        names = program.names()
        known = set(names)
        graph = cls(names)
        for function in program.functions:
            for used in sorted(free_names(function.body) & known):
                graph._add_edge(function.name, used)
        return graph

    def _add_node(self, name: str) -> None:
        if name not in self._rank:
            self._rank[name] = len(self._rank)
            self._g.add_node(name)

    def _add_edge(self, user: str, used: str) -> None:
        if user == used or self.uses(used, user):
            raise CyclicDependencyError(f"{user} -> {used} closes a cycle")
        self._add_node(user)
        self._add_node(used)
        self._g.add_edge(user, used)

    @property
    def nodes(self) -> list[str]:
        return list(self._rank)

    @property
    def edges(self) -> list[tuple[str, str]]:
        return list(self._g.edges)

    def with_edge(self, user: str, used: str) -> DependencyGraph:
        copy = self.copy()
        copy._add_edge(user, used)
        return copy

    def copy(self) -> DependencyGraph:
        copy = DependencyGraph.__new__(DependencyGraph)
        copy._g = self._g.copy()
        copy._rank = dict(self._rank)
        return copy

    def uses(self, user: str, used: str) -> bool:
        """True if `user` reaches `used` through one or more edges."""
        if user not in self._g or used not in self._g or user == used:
            return False
        return nx.has_path(self._g, user, used)

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self._g)

    def is_tree(self, root: str) -> bool:
        """Every node other than root has exactly one user and is reachable from root."""
        if root not in self._g:
            return False
        reachable = nx.descendants(self._g, root) | {root}
        if reachable != set(self._g.nodes):
            return False
        return all(self._g.in_degree(n) == (0 if n == root else 1) for n in self._g.nodes)

    def definition_order(self) -> list[str]:
        """Dependencies before dependents; among free choices the latest invented goes first."""
        reverse = self._g.reverse(copy=True)
        return list(nx.lexicographical_topological_sort(reverse, key=lambda n: -self._rank[n]))
