"""Unification, matching and semi-unification of first-order terms."""

import logging
from typing import Optional

import networkx as nx

from .models import App, Term, Var, iter_variables
from .terms import Substitution, VarSupply

logger = logging.getLogger(__name__)


def _walk(t: Term, bindings: dict) -> Term:
    while isinstance(t, Var) and t in bindings:
        t = bindings[t]
    return t


def _occurs(v: Var, t: Term, bindings: dict) -> bool:
    stack = [t]
    while stack:
        current = _walk(stack.pop(), bindings)
        if current == v:
            return True
        if isinstance(current, App):
            stack.extend(current.args)
    return False


def _resolve(t: Term, bindings: dict) -> Term:
    t = _walk(t, bindings)
    if isinstance(t, Var) or not t.args:
        return t
    return App(t.symbol, tuple(_resolve(a, bindings) for a in t.args))


def mgu(s: Term, t: Term) -> Optional[Substitution]:
    """Compute the most general unifier of s and t.

    Uses the occurs check. The returned substitution is idempotent.

    Args:
        s: First term
        t: Second term

    Returns:
        Substitution theta with s theta = t theta, or None if s and t do
        not unify
    """
    bindings: dict = {}
    stack = [(s, t)]
    while stack:
        a, b = stack.pop()
        a = _walk(a, bindings)
        b = _walk(b, bindings)
        if a == b:
            continue
        if isinstance(a, Var):
            if _occurs(a, b, bindings):
                return None
            bindings[a] = b
        elif isinstance(b, Var):
            if _occurs(b, a, bindings):
                return None
            bindings[b] = a
        elif a.symbol != b.symbol:
            return None
        else:
            stack.extend(reversed(list(zip(a.args, b.args))))
    return Substitution({v: _resolve(u, bindings) for v, u in bindings.items()})


def match(pattern: Term, target: Term) -> Optional[Substitution]:
    """Find theta with pattern theta = target.

    Variables of the target are rigid: only variables of the pattern are
    bound, even when both terms share variables.

    Returns:
        The matching substitution (unique on the variables of the pattern),
        or None if the target is not an instance of the pattern
    """
    bindings: dict = {}
    stack = [(pattern, target)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            bound = bindings.get(p)
            if bound is None:
                bindings[p] = u
            elif bound != u:
                return None
        elif isinstance(u, Var) or p.symbol != u.symbol:
            return None
        else:
            stack.extend(zip(p.args, u.args))
    return Substitution(bindings)


def semi_unify(s: Term, t: Term) -> Optional[tuple]:
    """Decide whether s semi-unifies with t.

    Looks for substitutions theta1, theta2 with s theta1 theta2 = t theta1.
    Unification (theta2 = id) and matching (theta1 = id) are tried first;
    otherwise the general closure procedure computes theta1 and theta2 is
    recovered by matching s theta1 against t theta1.

    Returns:
        Tuple (theta1, theta2), or None if s does not semi-unify with t
    """
    theta = mgu(s, t)
    if theta is not None:
        return theta, Substitution()
    sigma = match(s, t)
    if sigma is not None:
        return Substitution(), sigma

    theta1 = _SemiUnifier(s, t).solve()
    if theta1 is None:
        return None
    theta2 = match(theta1.apply(s), theta1.apply(t))
    if theta2 is None:
        raise AssertionError(
            f"semi-unification closure of {s} and {t} produced {theta1!r}, "
            f"which does not admit a matching instance"
        )
    return theta1, theta2


class _SemiUnifier:
    """Closure procedure for a single semi-unification problem s <= t.

    Nodes are the subterms of s and t plus variables created on demand.
    Equivalence classes (union-find) represent theta1: every class has at
    most one structure f(c1, ..., cn). Instance arcs between classes
    represent theta2, which must be a function on classes and commute with
    structure. Every derived fact is a consequence of any solution, so a
    clash or a cycle through a strict subterm edge means no solution exists.
    """

    MAX_CREATED = 2000

    def __init__(self, s: Term, t: Term) -> None:
        self.parent: list = []
        self.struct: list = []
        self.arc: list = []
        self.origin: list = []
        self._nodes: dict = {}
        self._supply = VarSupply()
        self._supply.reserve(s, t)
        self._eqs: list = []
        self._arcs: list = []
        self._check: set = set()
        self._created = 0
        self._next_check = 1
        self._root_s = self._intern(s)
        self._root_t = self._intern(t)
        self._variables = list(dict.fromkeys(iter_variables(s)))
        for v in iter_variables(t):
            if v not in self._variables:
                self._variables.append(v)

    def _new_node(self, origin: Optional[Var]) -> int:
        n = len(self.parent)
        self.parent.append(n)
        self.struct.append(None)
        self.arc.append(None)
        self.origin.append(origin)
        return n

    def _intern(self, t: Term) -> int:
        node = self._nodes.get(t)
        if node is not None:
            return node
        if isinstance(t, Var):
            node = self._new_node(t)
        else:
            kids = tuple(self._intern(a) for a in t.args)
            node = self._new_node(None)
            self.struct[node] = (t.symbol, kids)
        self._nodes[t] = node
        return node

    def find(self, n: int) -> int:
        root = n
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[n] != root:
            self.parent[n], n = root, self.parent[n]
        return root

    def _union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return True
        self.parent[rb] = ra
        sa, sb = self.struct[ra], self.struct[rb]
        if sa is not None and sb is not None:
            if sa[0] != sb[0]:
                return False
            self._eqs.extend(zip(sa[1], sb[1]))
        elif sb is not None:
            self.struct[ra] = sb
        ta, tb = self.arc[ra], self.arc[rb]
        if ta is not None and tb is not None:
            self._eqs.append((ta, tb))
        elif tb is not None:
            self.arc[ra] = tb
        self._check.add(ra)
        return True

    def _add_arc(self, a: int, b: int) -> None:
        ra = self.find(a)
        current = self.arc[ra]
        if current is None:
            self.arc[ra] = b
            self._check.add(ra)
        elif self.find(current) != self.find(b):
            self._eqs.append((current, b))

    def _propagate(self, r: int) -> bool:
        r = self.find(r)
        source, target = self.struct[r], self.arc[r]
        if source is None or target is None:
            return True
        d = self.find(target)
        symbol, kids = source
        existing = self.struct[d]
        if existing is None:
            self._created += 1
            # A size cycle survives every later merge: checking at doubling
            # creation counts still catches it.
            if self._created >= self._next_check:
                self._next_check *= 2
                if self._has_size_cycle():
                    return False
            if self._created > self.MAX_CREATED:
                if not self._has_size_cycle():
                    logger.warning("Semi-unification closure exceeded its node limit")
                return False
            fresh = tuple(self._new_node(None) for _ in kids)
            self.struct[d] = (symbol, fresh)
            self._arcs.extend(zip(kids, fresh))
            self._check.add(d)
            return True
        if existing[0] != symbol:
            return False
        self._arcs.extend(zip(kids, existing[1]))
        return True

    def _has_size_cycle(self) -> bool:
        """Detect a cycle through a strict subterm edge.

        Instance arcs never decrease term size and a subterm is strictly
        smaller than its parent, so such a cycle admits no finite solution.
        """
        graph = nx.DiGraph()
        strict = []
        for n in range(len(self.parent)):
            if self.find(n) != n:
                continue
            graph.add_node(n)
            if self.struct[n] is not None:
                for kid in self.struct[n][1]:
                    k = self.find(kid)
                    if k == n:
                        return True
                    graph.add_edge(k, n)
                    strict.append((k, n))
            if self.arc[n] is not None:
                graph.add_edge(n, self.find(self.arc[n]))
        component = {}
        for i, members in enumerate(nx.strongly_connected_components(graph)):
            for m in members:
                component[m] = i
        return any(component[k] == component[n] for k, n in strict)

    def solve(self) -> Optional[Substitution]:
        """Run the closure and return theta1, or None if no solution exists."""
        self._arcs.append((self._root_s, self._root_t))
        while self._eqs or self._arcs or self._check:
            if self._eqs:
                if not self._union(*self._eqs.pop()):
                    return None
            elif self._arcs:
                self._add_arc(*self._arcs.pop())
            elif not self._propagate(self._check.pop()):
                return None
        if self._has_size_cycle():
            return None
        return self._extract()

    def _extract(self) -> Substitution:
        representative: dict = {}
        for n, v in enumerate(self.origin):
            if v is None:
                continue
            r = self.find(n)
            if r not in representative or v.id < representative[r].id:
                representative[r] = v
        memo: dict = {}

        def build(n: int) -> Term:
            r = self.find(n)
            if r in memo:
                return memo[r]
            structure = self.struct[r]
            if structure is None:
                term = representative.get(r)
                if term is None:
                    term = self._supply.fresh()
                    representative[r] = term
            else:
                term = App(structure[0], tuple(build(k) for k in structure[1]))
            memo[r] = term
            return term

        return Substitution({v: build(self._nodes[v]) for v in self._variables})
