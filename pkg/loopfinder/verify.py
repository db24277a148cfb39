"""Independent check of loop witnesses by bounded rewriting search."""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .models import TRS, PositionError, Term
from .terms import EPSILON, Substitution, positions, replace_at, subterm_at
from .trs import iter_successors
from .unification import match

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerifyBounds:
    """Limits of the rewriting search."""

    max_depth: int = 25
    max_nodes: int = 200_000

    def __post_init__(self) -> None:
        """Validate the bounds."""
        if self.max_depth < 1:
            raise ValueError("max_depth must be positive")
        if self.max_nodes < 1:
            raise ValueError("max_nodes must be positive")


@dataclass(frozen=True)
class RewriteTrace:
    """A rewrite sequence from start to a term containing an instance of start.

    Attributes:
        start: The looping term
        steps: (position, rule number, result) triples; rule numbers start at 1
        closing_position: Position q of the final term with final|q = start theta
        closing_substitution: The substitution theta
    """

    start: Term
    steps: tuple
    closing_position: tuple = EPSILON
    closing_substitution: Substitution = Substitution()

    @property
    def final(self) -> Term:
        """Return the last term of the sequence."""
        return self.steps[-1][2] if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)


def _closing(u: Term, v: Term) -> Optional[tuple]:
    for q in positions(v):
        theta = match(u, subterm_at(v, q))
        if theta is not None:
            return q, theta
    return None


def verify_loop(
    trs: TRS, u: Term, bounds: VerifyBounds = VerifyBounds()
) -> Optional[RewriteTrace]:
    """Search for a rewrite sequence u ->+ C[u theta].

    Terms are explored breadth first, so the trace found is a shortest one
    within the bounds.

    Args:
        trs: TRS object
        u: Candidate looping term
        bounds: Depth and node limits

    Returns:
        RewriteTrace, or None if the bounds are exhausted first
    """
    parent: dict = {u: None}
    queue = deque([(u, 0)])
    while queue:
        t, depth = queue.popleft()
        if depth >= bounds.max_depth:
            continue
        for p, number, v in iter_successors(t, trs):
            closing = _closing(u, v)
            if closing is not None:
                steps = [(p, number, v)]
                current = t
                while parent[current] is not None:
                    previous, q, k = parent[current]
                    steps.append((q, k, current))
                    current = previous
                steps.reverse()
                logger.debug(f"Verified loop of {u} in {len(steps)} step(s)")
                return RewriteTrace(u, tuple(steps), *closing)
            if v in parent:
                continue
            if len(parent) >= bounds.max_nodes:
                logger.info(f"Verification of {u} stopped at {len(parent)} terms")
                return None
            parent[v] = (t, p, number)
            queue.append((v, depth + 1))
    logger.info(f"No loop of {u} within depth {bounds.max_depth}")
    return None


def replay_trace(trs: TRS, trace: RewriteTrace) -> bool:
    """Check a trace step by step against the rules of a TRS.

    Every step must rewrite its predecessor with the named rule at the
    named position, and the final term must contain start theta at the
    closing position.
    """
    if not trace.steps:
        return False
    current = trace.start
    try:
        for p, number, result in trace.steps:
            if not 1 <= number <= len(trs.rules):
                return False
            rule = trs.rules[number - 1]
            theta = match(rule.lhs, subterm_at(current, p))
            if theta is None or replace_at(current, p, theta.apply(rule.rhs)) != result:
                return False
            current = result
        closing = subterm_at(current, trace.closing_position)
    except PositionError:
        return False
    return trace.closing_substitution.apply(trace.start) == closing
