"""Tests for verify module."""

from dataclasses import replace

import pytest

from loopfinder.parser import TermReader
from loopfinder.terms import EPSILON, Substitution
from loopfinder.verify import RewriteTrace, VerifyBounds, replay_trace, verify_loop


@pytest.fixture
def reader() -> TermReader:
    """Create a term reader with variable x."""
    return TermReader("x")


@pytest.fixture
def toyama(reader):
    """Create the Toyama variant TRS."""
    return reader.trs("f(s(0),s(1),x) -> f(x,x,x)", "h -> 0", "h -> 1")


class TestVerifyLoop:
    """Test suite for verify_loop."""

    def test_toyama(self, reader, toyama):
        """Test the three-step loop of f(s(h),s(h),s(h))."""
        start = reader.term("f(s(h),s(h),s(h))")
        trace = verify_loop(toyama, start)
        assert trace is not None
        assert [(p, k) for p, k, _ in trace.steps] == [((1, 1), 2), ((2, 1), 3), ((), 1)]
        assert trace.steps[0][2] == reader.term("f(s(0),s(h),s(h))")
        assert trace.steps[1][2] == reader.term("f(s(0),s(1),s(h))")
        assert trace.final == start
        assert trace.closing_position == EPSILON
        assert trace.closing_substitution == Substitution()
        assert len(trace) == 3

    def test_toyama_variant_witness(self, reader, toyama):
        """Test the loop of f(s(h),s(1),s(h))."""
        trace = verify_loop(toyama, reader.term("f(s(h),s(1),s(h))"))
        assert [(p, k) for p, k, _ in trace.steps] == [((1, 1), 2), ((), 1), ((2, 1), 3)]
        assert replay_trace(toyama, trace)

    def test_mutual_recursion(self):
        """Test the two-step loop f(0) -> g(1) -> f(0)."""
        reader = TermReader()
        trs = reader.trs("f(0) -> g(1)", "g(1) -> f(0)")
        trace = verify_loop(trs, reader.term("f(0)"))
        assert trace.steps == (
            ((), 1, reader.term("g(1)")),
            ((), 2, reader.term("f(0)")),
        )

    def test_closing_substitution(self, reader):
        """Test a loop closing with a non-trivial substitution."""
        trs = reader.trs("f(x,x) -> f(g(x),h(x))", "h(x) -> g(x)")
        start = reader.term("f(x,x)")
        trace = verify_loop(trs, start)
        assert len(trace) == 2
        assert trace.closing_position == EPSILON
        assert trace.closing_substitution == Substitution(
            {reader.var("x"): reader.term("g(x)")}
        )
        assert replay_trace(trs, trace)

    def test_closing_below_root(self, reader):
        """Test a loop whose instance sits inside a context."""
        trs = reader.trs("f(x) -> c(f(s(x)))")
        trace = verify_loop(trs, reader.term("f(x)"))
        assert len(trace) == 1
        assert trace.closing_position == (1,)
        assert trace.closing_substitution == Substitution(
            {reader.var("x"): reader.term("s(x)")}
        )

    def test_normal_form(self):
        """Test that a term rewriting to a normal form has no loop."""
        reader = TermReader()
        assert verify_loop(reader.trs("0 -> 1"), reader.term("0")) is None

    def test_depth_bound(self, reader, toyama):
        """Test that a too shallow search gives up."""
        start = reader.term("f(s(h),s(h),s(h))")
        assert verify_loop(toyama, start, VerifyBounds(max_depth=2)) is None

    def test_node_bound(self, reader, toyama):
        """Test that the node budget stops the search."""
        start = reader.term("f(s(h),s(h),s(h))")
        assert verify_loop(toyama, start, VerifyBounds(max_nodes=1)) is None

    def test_invalid_bounds(self):
        """Test that non-positive bounds are rejected."""
        with pytest.raises(ValueError):
            VerifyBounds(max_depth=0)
        with pytest.raises(ValueError):
            VerifyBounds(max_nodes=0)


class TestReplayTrace:
    """Test suite for replay_trace."""

    @pytest.fixture
    def trace(self, reader, toyama) -> RewriteTrace:
        """Return the verified trace of f(s(h),s(h),s(h))."""
        return verify_loop(toyama, reader.term("f(s(h),s(h),s(h))"))

    def test_valid(self, toyama, trace):
        """Test that a found trace replays."""
        assert replay_trace(toyama, trace)

    def test_wrong_rule(self, toyama, trace):
        """Test that naming another rule breaks the replay."""
        (p, _, result), *rest = trace.steps
        tampered = replace(trace, steps=((p, 3, result), *rest))
        assert not replay_trace(toyama, tampered)

    def test_rule_out_of_range(self, toyama, trace):
        """Test that a nonexistent rule number breaks the replay."""
        (p, _, result), *rest = trace.steps
        tampered = replace(trace, steps=((p, 9, result), *rest))
        assert not replay_trace(toyama, tampered)

    def test_wrong_position(self, toyama, trace):
        """Test that a position outside the term breaks the replay."""
        (_, k, result), *rest = trace.steps
        tampered = replace(trace, steps=(((4, 1), k, result), *rest))
        assert not replay_trace(toyama, tampered)

    def test_wrong_closing_position(self, toyama, trace):
        """Test that a wrong closing position breaks the replay."""
        tampered = replace(trace, closing_position=(1,))
        assert not replay_trace(toyama, tampered)

    def test_empty(self, toyama, reader):
        """Test that a trace without steps is rejected."""
        assert not replay_trace(toyama, RewriteTrace(reader.term("h"), ()))
