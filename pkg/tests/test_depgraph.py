"""Tests for depgraph module."""

import pytest

from loopfinder.depgraph import (
    CycleLimits,
    DepGraph,
    build_graph,
    cap,
    connectable,
    ren,
    sccs,
    simple_cycles,
    syntactic_loop,
    validate_loop,
)
from loopfinder.models import App, Symbol, Var, variables
from loopfinder.parser import TermReader
from loopfinder.terms import VarSupply, canonical_form


@pytest.fixture
def reader() -> TermReader:
    """Create a term reader with variables x, y."""
    return TermReader("x y")


@pytest.fixture
def r_prime():
    """Create {f(0) -> f(1), f(2) -> f(0), 1 -> 0}."""
    return TermReader().trs("f(0) -> f(1)", "f(2) -> f(0)", "1 -> 0")


@pytest.fixture
def nodes():
    """Return N1, the isolated pair and N2 of r_prime."""
    reader = TermReader()
    return (
        reader.frule("f#(0) -> f#(1)"),
        reader.frule("f#(0) -> 1#"),
        reader.frule("f#(2) -> f#(0)"),
    )


DEFINED = frozenset({Symbol("f", 1), Symbol("1", 0)})


class TestCapAndRen:
    """Test suite for cap and ren."""

    def test_cap_defined_constant(self, reader):
        """Test that a defined argument is replaced by a fresh variable."""
        supply = VarSupply(100)
        result = cap(reader.term("f#(1)"), DEFINED, supply)
        assert result.symbol == Symbol("f", 1).marked()
        assert result.args == (Var(100),)

    def test_cap_undefined_constant(self, reader):
        """Test that terms without defined subterms are unchanged."""
        t = reader.term("f#(0)")
        assert cap(t, DEFINED, VarSupply(100)) == t

    def test_cap_keeps_variables(self, reader):
        """Test that variables map to themselves."""
        t = reader.term("f#(x)")
        assert cap(t, DEFINED, VarSupply(100)) == t

    def test_cap_idempotent(self, reader):
        """Test that capping twice changes nothing."""
        supply = VarSupply(100)
        once = cap(reader.term("c#(f(x),s(1),y)"), DEFINED, supply)
        assert cap(once, DEFINED, supply) == once

    def test_ren_occurrence_wise(self, reader):
        """Test that each variable occurrence gets a distinct fresh variable."""
        t = ren(reader.term("f(x,x)"), VarSupply(100))
        first, second = t.args
        assert isinstance(first, Var) and isinstance(second, Var)
        assert first != second
        assert reader.var("x") not in variables(t)

    def test_ren_ground(self, reader):
        """Test that ground terms are unchanged."""
        t = reader.term("f(a,b)")
        assert ren(t, VarSupply()) == t


class TestConnectable:
    """Test suite for connectable."""

    def test_self_arcs(self, nodes):
        """Test that N1 reaches itself and N2 does not."""
        n1, _, n2 = nodes
        assert connectable(n1, n1, DEFINED)
        assert not connectable(n2, n2, DEFINED)

    def test_capped_argument_reaches_any_lhs(self, nodes):
        """Test that a capped argument unifies with every f# left-hand side."""
        n1, isolated, n2 = nodes
        assert connectable(n1, n2, DEFINED)
        assert connectable(n1, isolated, DEFINED)

    def test_tuple_constant_reaches_nothing(self, nodes):
        """Test that 1# is connectable to no f# pair."""
        n1, isolated, n2 = nodes
        assert not any(connectable(isolated, b, DEFINED) for b in nodes)

    def test_shared_variables_ignored(self):
        """Test that rules sharing variables are compared after renaming."""
        reader = TermReader("x")
        a = reader.frule("g#(x,s(x)) -> g#(s(x),x)")
        assert connectable(a, a, {Symbol("g", 2)})


class TestBuildGraph:
    """Test suite for build_graph and DepGraph."""

    def test_toyama(self, reader):
        """Test the single self-looping node of the Toyama variant."""
        graph = build_graph(reader.trs("f(s(0),s(1),x) -> f(x,x,x)", "h -> 0", "h -> 1"))
        assert len(graph.nodes) == 1
        assert graph.arcs == {(0, 0)}

    def test_r_prime(self, r_prime, nodes):
        """Test nodes and arcs of the graph of r_prime."""
        graph = build_graph(r_prime)
        assert graph.nodes == nodes
        assert graph.arcs == {(0, 0), (0, 1), (0, 2), (2, 0), (2, 1)}
        assert graph.defined == DEFINED
        assert graph.successors(0) == [0, 1, 2]
        assert graph.successors(1) == []

    def test_no_dependency_pairs(self):
        """Test that {0 -> 1} gives the empty graph."""
        graph = build_graph(TermReader().trs("0 -> 1"))
        assert graph.nodes == ()
        assert graph.arcs == frozenset()

    def test_dump(self, r_prime):
        """Test the text rendering of the graph."""
        assert build_graph(r_prime).dump().splitlines() == [
            "0: f#(0) -> f#(1)",
            "1: f#(0) -> 1#",
            "2: f#(2) -> f#(0)",
            "0 -> 0",
            "0 -> 1",
            "0 -> 2",
            "2 -> 0",
            "2 -> 1",
        ]

    def test_to_networkx(self, r_prime):
        """Test conversion to a networkx DiGraph."""
        g = build_graph(r_prime).to_networkx()
        assert sorted(g.nodes) == [0, 1, 2]
        assert g.number_of_edges() == 5


class TestSccs:
    """Test suite for sccs."""

    def test_isolated_singleton_dropped(self, r_prime):
        """Test that the arc-free singleton is not a cyclic component."""
        assert sccs(build_graph(r_prime)) == [(0, 2)]

    def test_self_arc_singleton_kept(self, reader):
        """Test that a singleton with a self-arc is kept."""
        graph = build_graph(reader.trs("f(s(0),s(1),x) -> f(x,x,x)", "h -> 0", "h -> 1"))
        assert sccs(graph) == [(0,)]

    def test_empty(self):
        """Test that the empty graph has no components."""
        assert sccs(DepGraph((), frozenset())) == []

    def test_partition(self):
        """Test that components are disjoint and only keep internal arcs."""
        reader = TermReader("x")
        trs = reader.trs(
            "f(x) -> g(x)", "g(x) -> f(x)", "g(x) -> h(x)", "h(x) -> h(x)", "k(x) -> f(x)"
        )
        graph = build_graph(trs)
        components = sccs(graph)
        members = [i for component in components for i in component]
        assert len(members) == len(set(members))
        for component in components:
            assert any(i in component and j in component for i, j in graph.arcs)


class TestSyntacticLoops:
    """Test suite for syntactic_loop and validate_loop."""

    def test_rotation(self, nodes):
        """Test that the sequence starts at its least rule."""
        n1, _, n2 = nodes
        loop = syntactic_loop([n2, n1])
        assert loop.rules == (n1, n2)
        assert loop.key == syntactic_loop([n1, n2]).key

    def test_empty_rejected(self):
        """Test that an empty sequence is not a loop."""
        with pytest.raises(ValueError):
            syntactic_loop([])

    def test_validate(self, nodes):
        """Test the loop validator on connected and broken sequences."""
        n1, isolated, n2 = nodes
        assert validate_loop([n1], DEFINED)
        assert validate_loop([n1, n2], DEFINED)
        assert not validate_loop([n2], DEFINED)
        assert not validate_loop([n1, isolated], DEFINED)
        assert not validate_loop([n1, n1], DEFINED)
        assert not validate_loop([], DEFINED)


class TestSimpleCycles:
    """Test suite for simple_cycles."""

    def test_r_prime(self, r_prime, nodes):
        """Test the two simple cycles of r_prime, shortest first."""
        n1, _, n2 = nodes
        graph = build_graph(r_prime)
        loops = simple_cycles(graph, (0, 2))
        assert [loop.key for loop in loops] == [
            canonical_form([n1]),
            canonical_form([n1, n2]),
        ]

    def test_max_count(self, r_prime, nodes):
        """Test that enumeration stops at max_count loops."""
        graph = build_graph(r_prime)
        loops = simple_cycles(graph, (0, 2), CycleLimits(max_count=1))
        assert [loop.key for loop in loops] == [canonical_form([nodes[0]])]

    def test_max_count_within_length(self):
        """Test that a cut inside one length keeps the first cycles in order."""
        reader = TermReader("x")
        trs = reader.trs(*(f"{a}(x) -> {b}(x)" for a in "abc" for b in "abc"))
        graph = build_graph(trs)
        (component,) = sccs(graph)
        full = [loop.key for loop in simple_cycles(graph, component, CycleLimits(max_len=3))]
        assert len(full) > 13

        for count in range(1, len(full) + 1):
            loops = simple_cycles(graph, component, CycleLimits(count, 3))
            assert [loop.key for loop in loops] == full[:count]

    def test_max_len(self):
        """Test that cycles longer than max_len are skipped."""
        reader = TermReader("x")
        trs = reader.trs("f(x) -> g(x)", "g(x) -> h(x)", "h(x) -> f(x)")
        graph = build_graph(trs)
        (component,) = sccs(graph)
        assert len(simple_cycles(graph, component)) == 1
        assert simple_cycles(graph, component, CycleLimits(max_len=2)) == []

    def test_rules_renamed_apart(self):
        """Test that loop rules share no variables with each other or the graph."""
        reader = TermReader("x")
        trs = reader.trs("f(x) -> g(x)", "g(x) -> f(x)")
        graph = build_graph(trs)
        (component,) = sccs(graph)
        (loop,) = simple_cycles(graph, component)
        first, second = loop.rules
        node_vars = set().union(*(variables(n.lhs) for n in graph.nodes))
        assert variables(first.lhs).isdisjoint(variables(second.lhs))
        assert variables(first.lhs).isdisjoint(node_vars)
        assert variables(second.lhs).isdisjoint(node_vars)

    def test_loops_are_valid_and_distinct(self):
        """Test that every emitted loop passes the validator exactly once."""
        reader = TermReader("x y")
        trs = reader.trs(
            "f(x,y) -> g(y,x)", "g(x,y) -> f(x,x)", "g(x,y) -> f(y,y)", "f(x,x) -> f(x,x)"
        )
        graph = build_graph(trs)
        keys = []
        for component in sccs(graph):
            for loop in simple_cycles(graph, component):
                assert validate_loop(loop.rules, graph.defined)
                keys.append(loop.key)
        assert keys
        assert len(keys) == len(set(keys))

    def test_invalid_limits(self):
        """Test that non-positive limits are rejected."""
        with pytest.raises(ValueError):
            CycleLimits(max_count=0)
        with pytest.raises(ValueError):
            CycleLimits(max_len=0)
