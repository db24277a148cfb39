"""Loop search: unfold, test compressed loops, build and check witnesses."""

import logging
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional

from .depgraph import CycleLimits
from .models import TRS, FRule, LoopCriterion, Strategy, SyntacticLoop, Term, unmark
from .terms import Substitution, format_substitution, format_term
from .unfold import UnfoldBudget, gunf_iterate
from .unification import match, mgu, semi_unify
from .verify import RewriteTrace, VerifyBounds, verify_loop

logger = logging.getLogger(__name__)


class VerdictKind(Enum):
    """Answer of the prover."""

    NO = "NO"
    DONT_KNOW = "DON'T KNOW"
    TIMEOUT = "TIMEOUT"


@dataclass(frozen=True)
class ProofStats:
    """Effort spent on a proof attempt."""

    iterations: int = 0
    generated: int = 0
    elapsed: float = 0.0


@dataclass(frozen=True)
class LoopWitness:
    """A looping term and the data proving it loops.

    The compressed rule s# -> t# satisfies s theta1 theta2 = t theta1, and
    witness_term = s theta1 loops.
    """

    compressed_rule: FRule
    theta1: Substitution
    theta2: Substitution
    witness_term: Term
    verification: Optional[RewriteTrace] = None

    @property
    def verified(self) -> bool:
        """Check if a rewrite trace confirming the loop was found."""
        return self.verification is not None


@dataclass(frozen=True)
class Verdict:
    """Result of proving a TRS."""

    kind: VerdictKind
    stats: ProofStats = ProofStats()
    witness: Optional[LoopWitness] = None

    def __post_init__(self) -> None:
        """Check that exactly the NO answers carry a witness."""
        if (self.kind is VerdictKind.NO) != (self.witness is not None):
            raise ValueError(
                f"a {self.kind.value} verdict cannot have witness {self.witness}"
            )

    def __str__(self) -> str:
        return self.kind.value


def check_singleton(
    loop: SyntacticLoop, criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION
) -> Optional[LoopWitness]:
    """Test a singleton loop [s# -> t#] for a loop witness.

    Args:
        loop: Syntactic loop of length 1
        criterion: SEMI_UNIFICATION looks for theta1, theta2 with
                   s theta1 theta2 = t theta1; MATCH_UNIFY only accepts
                   s theta2 = t or s theta = t theta

    Returns:
        LoopWitness whose witness_term is s theta1, or None
    """
    if not loop.is_singleton:
        raise ValueError(f"loop {loop} is not a singleton")
    (rule,) = loop.rules
    s, t = unmark(rule.lhs), unmark(rule.rhs)

    if criterion is LoopCriterion.SEMI_UNIFICATION:
        solution = semi_unify(s, t)
    else:
        sigma = match(s, t)
        if sigma is not None:
            solution = (Substitution(), sigma)
        else:
            theta = mgu(s, t)
            solution = None if theta is None else (theta, Substitution())
    if solution is None:
        return None

    theta1, theta2 = solution
    if theta2.apply(theta1.apply(s)) != theta1.apply(t):
        logger.error(
            f"Rejected witness for {rule}: theta1={format_substitution(theta1)}, "
            f"theta2={format_substitution(theta2)} do not solve it"
        )
        return None
    witness = LoopWitness(rule, theta1, theta2, theta1.apply(s))
    logger.debug(f"Loop witness {format_term(witness.witness_term)} from {rule}")
    return witness


class LoopProver:
    """Searches a TRS for a looping term."""

    def __init__(
        self,
        strategy: Strategy = Strategy.LMNE,
        budget: UnfoldBudget = UnfoldBudget(),
        verify_bounds: VerifyBounds = VerifyBounds(),
        criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
        limits: CycleLimits = CycleLimits(),
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        """Initialize the prover.

        Args:
            strategy: Disagreement position selection strategy
            budget: Limits of the unfolding run
            verify_bounds: Limits of witness verification
            criterion: Test applied to singleton loops
            limits: Bounds on the initial simple-cycle enumeration
            clock: Source of the current time in seconds
        """
        self.strategy = strategy
        self.budget = budget
        self.verify_bounds = verify_bounds
        self.criterion = criterion
        self.limits = limits
        self.clock = clock

    def prove(self, trs: TRS) -> Verdict:
        """Run the loop search on a TRS.

        Returns:
            NO with a witness as soon as a singleton loop passes the test,
            DON'T KNOW when nothing is left to unfold, TIMEOUT when the
            budget runs out first
        """
        found: list = []

        def on_loop(loop: SyntacticLoop) -> bool:
            witness = check_singleton(loop, self.criterion)
            if witness is None:
                return False
            found.append(witness)
            return True

        logger.info(
            f"Proving {len(trs)} rule(s) with strategy {self.strategy.value}"
        )
        report = gunf_iterate(
            trs, self.strategy, self.budget, on_loop, self.limits, self.clock
        )
        stats = ProofStats(report.iterations, report.generated, report.elapsed)

        if report.found:
            witness = found[0]
            trace = verify_loop(trs, witness.witness_term, self.verify_bounds)
            if trace is None:
                term = format_term(witness.witness_term)
                logger.warning(f"Could not verify loop of {term}")
            verdict = Verdict(
                VerdictKind.NO, stats, replace(witness, verification=trace)
            )
        elif report.frontier_empty:
            verdict = Verdict(VerdictKind.DONT_KNOW, stats)
        else:
            verdict = Verdict(VerdictKind.TIMEOUT, stats)
        logger.info(f"Verdict {verdict} after {stats.iterations} iteration(s)")
        return verdict


def prove(
    trs: TRS,
    strategy: Strategy = Strategy.LMNE,
    budget: UnfoldBudget = UnfoldBudget(),
    verify_bounds: VerifyBounds = VerifyBounds(),
    criterion: LoopCriterion = LoopCriterion.SEMI_UNIFICATION,
) -> Verdict:
    """Search a TRS for a looping term; see LoopProver.prove."""
    return LoopProver(strategy, budget, verify_bounds, criterion).prove(trs)
