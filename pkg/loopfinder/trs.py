"""Defined symbols, dependency pairs and one-step rewriting."""

import logging
from typing import Iterator

from .models import TRS, App, FRule, Term, mark
from .terms import canonical_form, positions, replace_at, subterm_at
from .unification import match

logger = logging.getLogger(__name__)


def defined_symbols(trs: TRS) -> frozenset:
    """Return the root symbols of the left-hand sides of the rules."""
    return frozenset(rule.lhs.symbol for rule in trs.rules)


def dependency_pairs(trs: TRS) -> list:
    """Compute the dependency pairs of a TRS.

    One pair l# -> t# per rule l -> r and subterm t of r rooted by a
    defined symbol. Pairs are listed in rule order, then in pre-order of
    the position of t in r; pairs equal up to variable renaming are kept
    once.

    Args:
        trs: TRS object

    Returns:
        List of FRule objects
    """
    defined = defined_symbols(trs)
    seen = set()
    pairs = []
    for rule in trs.rules:
        for p in positions(rule.rhs):
            t = subterm_at(rule.rhs, p)
            if not isinstance(t, App) or t.symbol not in defined:
                continue
            pair = FRule(mark(rule.lhs), mark(t))
            key = canonical_form(pair)
            if key in seen:
                continue
            seen.add(key)
            pairs.append(pair)
    logger.debug(f"{len(pairs)} dependency pair(s) from {len(trs)} rule(s)")
    return pairs


def successors(t: Term, trs: TRS) -> list:
    """Return all one-step rewrites of t.

    Args:
        t: Term to rewrite
        trs: TRS object

    Returns:
        List of (position, rule number, result) triples, by position in
        lexicographic order, then by rule. Rule numbers start at 1.
    """
    return list(iter_successors(t, trs))


def iter_successors(t: Term, trs: TRS) -> Iterator[tuple]:
    """Lazily yield the one-step rewrites of t in the order of successors."""
    for p in positions(t):
        redex = subterm_at(t, p)
        if not isinstance(redex, App):
            continue
        for number, rule in enumerate(trs.rules, start=1):
            if rule.lhs.symbol != redex.symbol:
                continue
            theta = match(rule.lhs, redex)
            if theta is not None:
                yield p, number, replace_at(t, p, theta.apply(rule.rhs))
