"""Guided unfolding of syntactic loops.

Loops are unfolded step by step: adjacent rules are merged when the
right-hand side of one unifies with the left-hand side of the next, and
otherwise narrowed forwards or backwards at a selected disagreement
position to make them mergeable. Singleton loops keep being unfolded so
the prover can test each of them.
"""

import logging
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .depgraph import CycleLimits, build_graph, sccs, simple_cycles, syntactic_loop
from .depgraph import validate_loop
from .models import TRS, App, FRule, Strategy, SyntacticLoop, UnfoldContractError
from .terms import (
    VarSupply,
    canonical_form,
    dpos,
    format_position,
    is_prefix,
    npos,
    rename_apart,
    replace_at,
    subterm_at,
)
from .trs import defined_symbols
from .unification import mgu

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UnfoldBudget:
    """Resource limits of an unfolding run; None means unbounded."""

    timeout: Optional[float] = 120.0
    max_iterations: Optional[int] = None
    max_generated: Optional[int] = 10_000_000

    def __post_init__(self) -> None:
        """Validate the limits."""
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")
        if self.max_generated is not None and self.max_generated < 1:
            raise ValueError("max_generated must be positive")


@dataclass
class IterationReport:
    """Outcome of an unfolding run."""

    iterations: int = 0
    generated: int = 0
    frontier_empty: bool = False
    budget_exhausted: bool = False
    found: bool = False
    elapsed: float = 0.0


def _candidate(lhs, rhs) -> Optional[FRule]:
    if not (isinstance(lhs, App) and lhs.symbol.is_tuple):
        return None
    if not (isinstance(rhs, App) and rhs.symbol.is_tuple):
        return None
    return FRule(lhs, rhs)


def _forward(rule: FRule, guide, p, trs: TRS, supply: VarSupply) -> Iterator[tuple]:
    """Yield (q, rule number or None, unfolded rule) for forward unfolding."""
    if p not in dpos(rule.rhs, guide):
        raise UnfoldContractError(
            f"{format_position(p)} is not a disagreement position of "
            f"{rule.rhs} and {guide}"
        )
    l, r = rule.lhs, rule.rhs
    qs = npos(r, p)
    for q in qs:
        if not is_prefix(q, p):
            continue
        theta = mgu(subterm_at(r, q), subterm_at(guide, q))
        if theta is not None:
            u = _candidate(theta.apply(l), theta.apply(r))
            if u is not None:
                yield q, None, u
    for q in qs:
        below = subterm_at(r, q)
        for number, original in enumerate(trs.rules, start=1):
            narrowing = rename_apart(original, supply)
            theta = mgu(below, narrowing.lhs)
            if theta is None:
                continue
            u = _candidate(
                theta.apply(l), theta.apply(replace_at(r, q, narrowing.rhs))
            )
            if u is not None:
                yield q, number, u


def _backward(rule: FRule, guide, p, trs: TRS, supply: VarSupply) -> Iterator[tuple]:
    """Yield (q, rule number or None, unfolded rule) for backward unfolding."""
    if p not in dpos(guide, rule.lhs):
        raise UnfoldContractError(
            f"{format_position(p)} is not a disagreement position of "
            f"{guide} and {rule.lhs}"
        )
    s, t = rule.lhs, rule.rhs
    qs = npos(s, p)
    for q in qs:
        if not is_prefix(q, p):
            continue
        theta = mgu(subterm_at(guide, q), subterm_at(s, q))
        if theta is not None:
            u = _candidate(theta.apply(s), theta.apply(t))
            if u is not None:
                yield q, None, u
    for q in qs:
        below = subterm_at(s, q)
        for number, original in enumerate(trs.rules, start=1):
            narrowing = rename_apart(original, supply)
            theta = mgu(below, narrowing.rhs)
            if theta is None:
                continue
            u = _candidate(
                theta.apply(replace_at(s, q, narrowing.lhs)), theta.apply(t)
            )
            if u is not None:
                yield q, number, u


def _unique(steps: Iterator[tuple]) -> Iterator[tuple]:
    seen = set()
    for step in steps:
        key = canonical_form(step[2])
        if key not in seen:
            seen.add(key)
            yield step


def forward_unfold(
    rule: FRule, guide, p, trs: TRS, supply: Optional[VarSupply] = None
) -> list:
    """Compute the forward unfoldings of rule at p, guided by a term.

    Either the right-hand side is instantiated so that it agrees with the
    guide at a prefix q of p, or it is narrowed at a non-variable position
    q above or below p with a rule of the TRS.

    Args:
        rule: F#-rule l -> r
        guide: Term s with p a disagreement position of r and s
        p: Disagreement position
        trs: TRS supplying the narrowing rules
        supply: Variable supply used to rename TRS rules apart

    Returns:
        List of F#-rules, instantiation results first, then narrowing
        results by position and rule, without duplicates up to renaming

    Raises:
        UnfoldContractError: If p is not a disagreement position of r and s
    """
    supply = supply or _supply_for(rule, guide, trs)
    return [u for _, _, u in _unique(_forward(rule, guide, p, trs, supply))]


def backward_unfold(
    rule: FRule, guide, p, trs: TRS, supply: Optional[VarSupply] = None
) -> list:
    """Compute the backward unfoldings of rule s -> t at p, guided by a term r.

    The mirror image of forward_unfold: the left-hand side is instantiated
    to agree with r, or narrowed backwards by replacing an instance of a
    rule's right-hand side with its left-hand side.

    Raises:
        UnfoldContractError: If p is not a disagreement position of r and s
    """
    supply = supply or _supply_for(rule, guide, trs)
    return [u for _, _, u in _unique(_backward(rule, guide, p, trs, supply))]


def _supply_for(*objects) -> VarSupply:
    supply = VarSupply()
    supply.reserve(*objects)
    return supply


def select(
    strategy: Strategy,
    first: FRule,
    second: FRule,
    trs: TRS,
    supply: Optional[VarSupply] = None,
) -> list:
    """Select the disagreement positions to unfold for two adjacent rules.

    Args:
        strategy: ALL keeps every disagreement position, LM the leftmost
                  one, LMNE the leftmost one at which some forward or
                  backward unfolding exists
        first: Rule l -> r
        second: Rule s -> t following it
        trs: TRS object
        supply: Variable supply

    Returns:
        List of positions in lexicographic order
    """
    candidates = dpos(first.rhs, second.lhs)
    if strategy is Strategy.ALL:
        return candidates
    if strategy is Strategy.LM:
        return candidates[:1]
    supply = supply or _supply_for(first, second, trs)
    for p in candidates:
        if next(_forward(first, second.lhs, p, trs, supply), None) is not None:
            return [p]
        if next(_backward(second, first.rhs, p, trs, supply), None) is not None:
            return [p]
    return []


def _trace(loop: SyntacticLoop, case: int, p, q, number) -> None:
    where = "-" if p is None else format_position(p)
    at = "-" if q is None else format_position(q)
    logger.debug(
        f"unfold {loop}: case ({case}) p={where} q={at} "
        f"rule={number if number is not None else '-'}"
    )


def gu_step(
    loops, trs: TRS, strategy: Strategy, supply: Optional[VarSupply] = None
) -> list:
    """Apply one round of guided unfolding to a set of syntactic loops.

    For every window of two cyclically adjacent rules the rules are merged
    when possible, and each is unfolded towards the other at the selected
    positions. Singleton loops are unfolded against themselves. Only
    results that are syntactic loops are kept, each once.

    Args:
        loops: Iterable of SyntacticLoop objects
        trs: TRS object
        strategy: Position selection strategy
        supply: Variable supply past every variable of the loops and the TRS

    Returns:
        List of new SyntacticLoop objects in production order
    """
    loops = list(loops)
    if supply is None:
        supply = _supply_for(trs, loops)
    defined = defined_symbols(trs)
    tracing = logger.isEnabledFor(logging.DEBUG)
    results = []
    seen = set()

    def offer(rules: list) -> bool:
        if not validate_loop(rules, defined, supply):
            return False
        loop = syntactic_loop(rules)
        if loop.key in seen:
            return False
        seen.add(loop.key)
        results.append(loop)
        return True

    for loop in loops:
        if loop.is_singleton:
            (rule,) = loop.rules
            for p in select(strategy, rule, rule, trs, supply):
                steps = list(_forward(rule, rule.lhs, p, trs, supply))
                steps += _backward(rule, rule.rhs, p, trs, supply)
                for q, number, u in _unique(iter(steps)):
                    if offer([rename_apart(u, supply)]) and tracing:
                        _trace(loop, 4, p, q, number)
            continue

        for i in range(len(loop)):
            rotated = loop.rules[i:] + loop.rules[:i]
            first, second, rest = rotated[0], rotated[1], list(rotated[2:])
            theta = mgu(first.rhs, second.lhs)
            if theta is not None:
                merged = _candidate(theta.apply(first.lhs), theta.apply(second.rhs))
                if merged is not None and offer([rename_apart(merged, supply)] + rest):
                    if tracing:
                        _trace(loop, 1, None, None, None)
            for p in select(strategy, first, second, trs, supply):
                for q, number, u in _unique(_forward(first, second.lhs, p, trs, supply)):
                    if offer([rename_apart(u, supply), second] + rest) and tracing:
                        _trace(loop, 2, p, q, number)
                for q, number, u in _unique(
                    _backward(second, first.rhs, p, trs, supply)
                ):
                    if offer([first, rename_apart(u, supply)] + rest) and tracing:
                        _trace(loop, 3, p, q, number)
    return results


def initial_loops(
    trs: TRS, limits: CycleLimits = CycleLimits(), supply: Optional[VarSupply] = None
) -> list:
    """Return the simple cycles of every cyclic component of the dependency graph."""
    graph = build_graph(trs)
    if supply is None:
        supply = _supply_for(trs, list(graph.nodes))
    else:
        supply.reserve(list(graph.nodes))
    loops = []
    seen = set()
    for component in sccs(graph):
        for loop in simple_cycles(graph, component, limits, supply):
            if loop.key not in seen:
                seen.add(loop.key)
                loops.append(loop)
    return loops


def gunf_iterate(
    trs: TRS,
    strategy: Strategy,
    budget: UnfoldBudget,
    on_loop: Callable[[SyntacticLoop], bool],
    limits: CycleLimits = CycleLimits(),
    clock: Callable[[], float] = time.monotonic,
) -> IterationReport:
    """Iterate guided unfolding from the simple cycles of a TRS.

    A loop produced before (up to renaming and rotation) is not explored
    again. on_loop is called with every singleton loop as soon as it is
    produced, including those among the simple cycles; a true return
    value stops the run.

    Args:
        trs: TRS object
        strategy: Position selection strategy
        budget: Time, iteration and generation limits
        on_loop: Callback testing a singleton loop
        limits: Bounds on the initial cycle enumeration
        clock: Source of the current time in seconds

    Returns:
        IterationReport describing why the run stopped
    """
    start = clock()
    report = IterationReport()
    supply = _supply_for(trs)

    def timed_out() -> bool:
        return budget.timeout is not None and clock() - start >= budget.timeout

    def over_generated() -> bool:
        return (
            budget.max_generated is not None
            and report.generated >= budget.max_generated
        )

    def finish() -> IterationReport:
        report.elapsed = clock() - start
        logger.info(
            f"Unfolding stopped after {report.iterations} iteration(s), "
            f"{report.generated} loop(s) generated"
        )
        return report

    frontier = initial_loops(trs, limits, supply)
    seen = {loop.key for loop in frontier}
    report.generated = len(frontier)
    for loop in frontier:
        if loop.is_singleton and on_loop(loop):
            report.found = True
            return finish()

    while True:
        if not frontier:
            report.frontier_empty = True
            return finish()
        if (
            timed_out()
            or over_generated()
            or (
                budget.max_iterations is not None
                and report.iterations >= budget.max_iterations
            )
        ):
            report.budget_exhausted = True
            return finish()

        report.iterations += 1
        produced = []
        for loop in frontier:
            for new in gu_step([loop], trs, strategy, supply):
                if new.key in seen:
                    continue
                seen.add(new.key)
                produced.append(new)
                report.generated += 1
                if new.is_singleton and on_loop(new):
                    report.found = True
                    return finish()
            if timed_out() or over_generated():
                report.budget_exhausted = True
                return finish()
        frontier = produced
