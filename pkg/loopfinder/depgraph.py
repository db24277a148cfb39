"""Estimated dependency graph, its cyclic components and syntactic loops."""

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import networkx as nx

from .models import TRS, App, FRule, SyntacticLoop, Term, Var
from .terms import VarSupply, canonical_form, format_rule, rename_apart
from .trs import defined_symbols, dependency_pairs
from .unification import mgu

logger = logging.getLogger(__name__)


def cap(t: Term, defined: Iterable, supply: VarSupply) -> Term:
    """Replace each outermost subterm with a defined root by a fresh variable."""
    defined = defined if isinstance(defined, (set, frozenset)) else set(defined)
    if isinstance(t, Var):
        return t
    if t.symbol in defined:
        return supply.fresh()
    if not t.args:
        return t
    return App(t.symbol, tuple(cap(a, defined, supply) for a in t.args))


def ren(t: Term, supply: VarSupply) -> Term:
    """Replace every variable occurrence by a distinct fresh variable."""
    if isinstance(t, Var):
        return supply.fresh()
    if not t.args:
        return t
    return App(t.symbol, tuple(ren(a, supply) for a in t.args))


def connectable(
    a: FRule, b: FRule, defined: Iterable, supply: Optional[VarSupply] = None
) -> bool:
    """Check whether ren(cap(rhs(a))) unifies with lhs(b).

    Args:
        a: Source F#-rule
        b: Target F#-rule
        defined: Defined symbols of the TRS
        supply: Variable supply past every variable of a and b

    Returns:
        True if a is connectable to b
    """
    if supply is None:
        supply = VarSupply()
        supply.reserve(a, b)
    estimate = ren(cap(a.rhs, defined, supply), supply)
    return mgu(estimate, b.lhs) is not None


@dataclass(frozen=True)
class CycleLimits:
    """Bounds on simple-cycle enumeration."""

    max_count: int = 5000
    max_len: int = 16

    def __post_init__(self) -> None:
        """Validate the limits."""
        if self.max_count < 1:
            raise ValueError("max_count must be at least 1")
        if self.max_len < 1:
            raise ValueError("max_len must be at least 1")


@dataclass(frozen=True)
class DepGraph:
    """Estimated dependency graph: dependency pairs and connectability arcs."""

    nodes: tuple
    arcs: frozenset
    defined: frozenset = field(default_factory=frozenset)

    def successors(self, i: int) -> list:
        """Return the targets of the arcs leaving node i, sorted."""
        return sorted(j for (k, j) in self.arcs if k == i)

    def to_networkx(self) -> nx.DiGraph:
        """Return the graph as a networkx DiGraph over node indices."""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.nodes)))
        graph.add_edges_from(sorted(self.arcs))
        return graph

    def dump(self) -> str:
        """Render the nodes and the arc list, one ``i -> j`` per line."""
        lines = [f"{i}: {format_rule(rule)}" for i, rule in enumerate(self.nodes)]
        lines.extend(f"{i} -> {j}" for i, j in sorted(self.arcs))
        return "\n".join(lines)


def build_graph(trs: TRS) -> DepGraph:
    """Build the estimated dependency graph of a TRS."""
    nodes = tuple(dependency_pairs(trs))
    defined = defined_symbols(trs)
    supply = VarSupply()
    supply.reserve(list(nodes))
    arcs = frozenset(
        (i, j)
        for i, a in enumerate(nodes)
        for j, b in enumerate(nodes)
        if connectable(a, b, defined, supply)
    )
    logger.info(f"Dependency graph: {len(nodes)} node(s), {len(arcs)} arc(s)")
    return DepGraph(nodes, arcs, defined)


def sccs(graph: DepGraph) -> list:
    """Return the strongly connected components that contain at least one arc.

    Returns:
        List of sorted tuples of node indices, ordered by their least node
    """
    g = graph.to_networkx()
    components = []
    for members in nx.strongly_connected_components(g):
        if len(members) == 1:
            (node,) = members
            if not g.has_edge(node, node):
                continue
        components.append(tuple(sorted(members)))
    components.sort()
    logger.info(f"{len(components)} cyclic component(s)")
    return components


def syntactic_loop(rules: Sequence) -> SyntacticLoop:
    """Build a SyntacticLoop, rotating the cyclic sequence to start at its least rule."""
    rules = tuple(rules)
    if not rules:
        raise ValueError("a syntactic loop needs at least one rule")
    forms = [canonical_form(rule) for rule in rules]
    start = forms.index(min(forms))
    return SyntacticLoop(rules[start:] + rules[:start], tuple(sorted(forms)))


def validate_loop(
    rules: Sequence, defined: Iterable, supply: Optional[VarSupply] = None
) -> bool:
    """Check that rules form a syntactic loop.

    The sequence must be nonempty, its rules pairwise distinct up to
    variable renaming, and each rule connectable to its cyclic successor.
    """
    rules = list(rules)
    if not rules:
        return False
    if len({canonical_form(rule) for rule in rules}) != len(rules):
        return False
    if supply is None:
        supply = VarSupply()
        supply.reserve(rules)
    return all(
        connectable(rule, rules[(i + 1) % len(rules)], defined, supply)
        for i, rule in enumerate(rules)
    )


def simple_cycles(
    graph: DepGraph,
    component: Sequence,
    limits: CycleLimits = CycleLimits(),
    supply: Optional[VarSupply] = None,
) -> list:
    """Enumerate simple cycles of a component as syntactic loops.

    Cycles are produced shortest first; within a length they are sorted by
    their node indices, rotated to start at the least index. Enumeration
    stops at limits.max_count loops and never goes past limits.max_len.
    Rules within a loop are renamed apart; loops with the same rules up to
    renaming and order are emitted once.

    Args:
        graph: Dependency graph
        component: Node indices of a strongly connected component
        limits: Enumeration bounds
        supply: Variable supply used for renaming apart

    Returns:
        List of SyntacticLoop objects
    """
    if supply is None:
        supply = VarSupply()
        supply.reserve(list(graph.nodes))
    sub = graph.to_networkx().subgraph(sorted(component))
    loops = []
    seen = set()
    for length in range(1, limits.max_len + 1):
        wanted = limits.max_count - len(loops)
        if wanted <= 0:
            break
        cycles = []
        for cycle in nx.simple_cycles(sub, length_bound=length):
            if len(cycle) != length:
                continue
            start = cycle.index(min(cycle))
            cycles.append(tuple(cycle[start:] + cycle[:start]))
        found = {}
        for cycle in sorted(cycles):
            if len(found) >= wanted:
                break
            key = canonical_form([graph.nodes[i] for i in cycle])
            if key not in seen and key not in found:
                found[key] = cycle
        for key, cycle in found.items():
            seen.add(key)
            loops.append(
                syntactic_loop(rename_apart(graph.nodes[i], supply) for i in cycle)
            )
        if length >= len(component):
            break
    logger.info(f"{len(loops)} simple cycle(s) in component of size {len(component)}")
    return loops
