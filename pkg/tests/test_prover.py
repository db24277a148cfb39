"""Tests for prover module."""

import logging
from unittest.mock import patch

import pytest

from loopfinder.depgraph import syntactic_loop
from loopfinder.models import App, LoopCriterion, Strategy, Symbol, Var, unmark
from loopfinder.parser import TermReader
from loopfinder.prover import (
    LoopProver,
    LoopWitness,
    ProofStats,
    Verdict,
    VerdictKind,
    check_singleton,
    prove,
)
from loopfinder.terms import Substitution
from loopfinder.unfold import UnfoldBudget
from loopfinder.verify import replay_trace

BUDGET = UnfoldBudget(timeout=None, max_iterations=10)


@pytest.fixture
def toyama():
    """Create the Toyama variant TRS."""
    return TermReader("x").trs("f(s(0),s(1),x) -> f(x,x,x)", "h -> 0", "h -> 1")


@pytest.fixture
def self_guided():
    """Create {f(x,x) -> f(g(x),h(x)), h(x) -> g(x)}."""
    return TermReader("x").trs("f(x,x) -> f(g(x),h(x))", "h(x) -> g(x)")


class TestCheckSingleton:
    """Test suite for check_singleton."""

    def test_ground_loop(self):
        """Test a ground rule rewriting to itself."""
        reader = TermReader()
        loop = syntactic_loop([reader.frule("f#(s(h),s(h),s(h)) -> f#(s(h),s(h),s(h))")])
        witness = check_singleton(loop)
        assert witness.witness_term == reader.term("f(s(h),s(h),s(h))")
        assert witness.theta1 == Substitution()
        assert witness.theta2 == Substitution()

    def test_constant_loop(self):
        """Test f#(0) -> f#(0)."""
        reader = TermReader()
        witness = check_singleton(syntactic_loop([reader.frule("f#(0) -> f#(0)")]))
        assert witness.witness_term == reader.term("f(0)")
        assert not witness.witness_term.symbol.is_tuple

    def test_semi_unification(self):
        """Test a rule needing both substitutions."""
        reader = TermReader("x y")
        rule = reader.frule("f#(g(x,0),y) -> f#(g(0,x),h(y))")
        witness = check_singleton(syntactic_loop([rule]))
        x, y = reader.var("x"), reader.var("y")
        assert witness.theta1 == Substitution({x: reader.term("0")})
        assert witness.theta2 == Substitution({y: reader.term("h(y)")})
        assert witness.witness_term == reader.term("f(g(0,0),y)")
        assert witness.compressed_rule == rule
        assert not witness.verified

    def test_no_witness(self):
        """Test a singleton whose sides clash."""
        reader = TermReader("x")
        rule = reader.frule("f#(x,x) -> f#(g(x),h(x))")
        assert check_singleton(syntactic_loop([rule])) is None

    def test_match_unify_criterion(self):
        """Test that the restricted criterion still accepts matching rules."""
        reader = TermReader("x")
        rule = reader.frule("f#(x,x) -> f#(g(x),g(x))")
        witness = check_singleton(syntactic_loop([rule]), LoopCriterion.MATCH_UNIFY)
        assert witness.theta1 == Substitution()
        assert witness.theta2 == Substitution({reader.var("x"): reader.term("g(x)")})

    def test_match_unify_unifying(self):
        """Test that the restricted criterion accepts unifiable sides."""
        reader = TermReader("x y")
        rule = reader.frule("f#(x,0) -> f#(1,y)")
        witness = check_singleton(syntactic_loop([rule]), LoopCriterion.MATCH_UNIFY)
        assert witness.witness_term == reader.term("f(1,0)")

    def test_match_unify_rejects_semi_unifiable(self):
        """Test that the restricted criterion misses semi-unifiable rules."""
        reader = TermReader("x y")
        rule = reader.frule("f#(g(x,0),y) -> f#(g(0,x),h(y))")
        loop = syntactic_loop([rule])
        assert check_singleton(loop, LoopCriterion.MATCH_UNIFY) is None
        assert check_singleton(loop, LoopCriterion.SEMI_UNIFICATION) is not None

    def test_rejects_longer_loops(self):
        """Test that only singleton loops can be checked."""
        reader = TermReader()
        loop = syntactic_loop([reader.frule("f#(0) -> g#(1)"), reader.frule("g#(1) -> f#(0)")])
        with pytest.raises(ValueError, match="not a singleton"):
            check_singleton(loop)

    def test_rejects_bad_solution(self, caplog):
        """Test that a solution failing the direct check is discarded."""
        reader = TermReader()
        loop = syntactic_loop([reader.frule("f#(0) -> f#(1)")])
        with patch(
            "loopfinder.prover.semi_unify", return_value=(Substitution(), Substitution())
        ):
            assert check_singleton(loop) is None
        assert "Rejected witness" in caplog.text


class TestProve:
    """Test suite for prove and LoopProver."""

    @pytest.mark.parametrize("strategy", list(Strategy))
    def test_toyama(self, toyama, strategy):
        """Test that every strategy proves the Toyama variant looping."""
        verdict = prove(toyama, strategy, BUDGET)
        assert verdict.kind is VerdictKind.NO
        assert verdict.stats.iterations <= 3
        reader = TermReader()
        assert verdict.witness.witness_term in (
            reader.term("f(s(h),s(h),s(h))"),
            reader.term("f(s(h),s(1),s(h))"),
        )
        assert verdict.witness.verified
        assert len(verdict.witness.verification) == 3
        assert replay_trace(toyama, verdict.witness.verification)

    def test_toyama_leftmost_non_empty(self, toyama):
        """Test the witness found with the default strategy."""
        verdict = prove(toyama, Strategy.LMNE, BUDGET)
        assert verdict.stats.iterations == 3
        assert verdict.witness.witness_term == TermReader().term("f(s(h),s(1),s(h))")
        assert str(verdict) == "NO"

    def test_mutual_recursion(self):
        """Test f(0) -> g(1), g(1) -> f(0)."""
        reader = TermReader()
        trs = reader.trs("f(0) -> g(1)", "g(1) -> f(0)")
        verdict = prove(trs, Strategy.LMNE, BUDGET)
        assert verdict.kind is VerdictKind.NO
        assert verdict.stats.iterations == 1
        assert verdict.witness.witness_term == reader.term("f(0)")
        assert len(verdict.witness.verification) == 2

    def test_semi_unification_at_iteration_zero(self):
        """Test a loop found on the dependency pair itself."""
        reader = TermReader("x y")
        trs = reader.trs("f(g(x,0),y) -> f(g(0,x),h(y))")
        verdict = prove(trs, Strategy.LMNE, BUDGET)
        assert verdict.kind is VerdictKind.NO
        assert verdict.stats.iterations == 0
        term = verdict.witness.witness_term
        assert term.args[0] == reader.term("g(0,0)")
        assert isinstance(term.args[1], Var)
        assert [image for _, image in verdict.witness.theta1.items()] == [reader.term("0")]
        assert replay_trace(trs, verdict.witness.verification)

    def test_self_guided_leftmost(self, self_guided):
        """Test that LM gives up on the self-guided system."""
        verdict = prove(self_guided, Strategy.LM, BUDGET)
        assert verdict.kind is VerdictKind.DONT_KNOW
        assert verdict.stats.iterations == 1
        assert verdict.witness is None

    def test_self_guided_leftmost_non_empty(self, self_guided):
        """Test that LMNE finds f(x,x) looping."""
        verdict = prove(self_guided, Strategy.LMNE, BUDGET)
        assert verdict.kind is VerdictKind.NO
        term = verdict.witness.witness_term
        assert term.symbol == Symbol("f", 2)
        assert isinstance(term.args[0], Var)
        assert term.args[0] == term.args[1]
        assert len(verdict.witness.verification) == 2

    def test_no_dependency_pairs(self):
        """Test that {0 -> 1} is answered DON'T KNOW at iteration 0."""
        verdict = prove(TermReader().trs("0 -> 1"), Strategy.LMNE, BUDGET)
        assert verdict.kind is VerdictKind.DONT_KNOW
        assert verdict.stats.iterations == 0
        assert verdict.stats.generated == 0
        assert str(verdict) == "DON'T KNOW"

    def test_timeout(self, toyama):
        """Test that an exhausted budget gives TIMEOUT."""
        budget = UnfoldBudget(timeout=None, max_iterations=1)
        verdict = LoopProver(Strategy.LM, budget).prove(toyama)
        assert verdict.kind is VerdictKind.TIMEOUT
        assert verdict.stats == ProofStats(1, 2, verdict.stats.elapsed)

    def test_wall_clock_timeout(self, toyama):
        """Test the time budget with an injected clock."""
        ticks = iter(range(0, 1000, 50))
        prover = LoopProver(
            Strategy.LM, UnfoldBudget(timeout=10.0), clock=lambda: float(next(ticks))
        )
        assert prover.prove(toyama).kind is VerdictKind.TIMEOUT

    def test_unverified_witness(self, toyama, caplog):
        """Test that a failed verification keeps the NO verdict."""
        with patch("loopfinder.prover.verify_loop", return_value=None):
            with caplog.at_level(logging.WARNING):
                verdict = prove(toyama, Strategy.LMNE, BUDGET)
        assert verdict.kind is VerdictKind.NO
        assert not verdict.witness.verified
        assert "Could not verify" in caplog.text

    def test_witness_invariant(self, toyama):
        """Test that every NO witness solves its compressed rule."""
        for strategy in Strategy:
            witness = prove(toyama, strategy, BUDGET).witness
            rule = witness.compressed_rule
            s, t = unmark(rule.lhs), unmark(rule.rhs)
            assert witness.theta2.apply(witness.theta1.apply(s)) == witness.theta1.apply(t)


class TestVerdict:
    """Test suite for Verdict class."""

    @pytest.fixture
    def witness(self) -> LoopWitness:
        """Return the witness of f#(0) -> f#(0)."""
        return check_singleton(syntactic_loop([TermReader().frule("f#(0) -> f#(0)")]))

    def test_no_requires_witness(self):
        """Test that NO without a witness is rejected."""
        with pytest.raises(ValueError):
            Verdict(VerdictKind.NO)

    def test_witness_only_for_no(self, witness):
        """Test that other verdicts cannot carry a witness."""
        with pytest.raises(ValueError):
            Verdict(VerdictKind.DONT_KNOW, witness=witness)

    def test_str(self, witness):
        """Test the verdict tokens."""
        assert str(Verdict(VerdictKind.NO, witness=witness)) == "NO"
        assert str(Verdict(VerdictKind.TIMEOUT)) == "TIMEOUT"

    def test_plain_witness_term(self, witness):
        """Test that the witness term is built from plain symbols."""
        assert witness.witness_term == App(Symbol("f", 1), (App(Symbol("0", 0)),))
