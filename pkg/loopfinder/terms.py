"""Term operations: positions, substitutions, renaming and printing."""

import itertools
from typing import Iterable, Iterator, Mapping, Optional, Union

from .models import (
    TRS,
    App,
    FRule,
    PositionError,
    Rule,
    SyntacticLoop,
    Term,
    Var,
    iter_variables,
    root,
)

Position = tuple

EPSILON: Position = ()


def format_position(p: Position) -> str:
    """Render a position dot-separated, the root as ``ε``."""
    if not p:
        return "ε"
    return ".".join(str(i) for i in p)


def is_prefix(p: Position, q: Position) -> bool:
    """Check p <= q, i.e. p is a prefix of q."""
    return len(p) <= len(q) and q[: len(p)] == p


def positions(t: Term) -> list:
    """Return Pos(t) in pre-order, which is lexicographic order."""
    result = []
    stack = [(t, EPSILON)]
    while stack:
        current, p = stack.pop()
        result.append(p)
        if isinstance(current, App):
            for i in range(len(current.args), 0, -1):
                stack.append((current.args[i - 1], p + (i,)))
    return result


def subterm_at(t: Term, p: Position) -> Term:
    """Return t|p.

    Raises:
        PositionError: If p is not a position of t
    """
    current = t
    for depth, i in enumerate(p):
        if not isinstance(current, App) or not 1 <= i <= len(current.args):
            raise PositionError(
                f"position {format_position(p)} is not a position of {t} "
                f"(fails at step {depth + 1})"
            )
        current = current.args[i - 1]
    return current


def replace_at(t: Term, p: Position, s: Term) -> Term:
    """Return t[p <- s]; t itself is left unchanged.

    Raises:
        PositionError: If p is not a position of t
    """
    if not p:
        return s
    if not isinstance(t, App) or not 1 <= p[0] <= len(t.args):
        raise PositionError(f"position {format_position(p)} is not a position of {t}")
    i = p[0] - 1
    args = list(t.args)
    args[i] = replace_at(args[i], p[1:], s)
    return App(t.symbol, tuple(args))


def dpos(s: Term, t: Term) -> list:
    """Return the disagreement positions of s and t, in lexicographic order.

    A position p is a disagreement position when the roots of s|p and t|p
    differ (variables have the bottom root) while the roots agree at every
    proper prefix of p.
    """
    result = []
    stack = [(s, t, EPSILON)]
    while stack:
        a, b, p = stack.pop()
        ra, rb = root(a), root(b)
        if ra != rb:
            result.append(p)
        elif ra is not None:
            for i in range(len(a.args), 0, -1):
                stack.append((a.args[i - 1], b.args[i - 1], p + (i,)))
    return result


def npos(t: Term, p: Position) -> list:
    """Return NPos(t, p): non-variable positions that are prefixes or extensions of p.

    Raises:
        PositionError: If p is not a position of t
    """
    below = subterm_at(t, p)
    result = [p[:k] for k in range(len(p)) if isinstance(subterm_at(t, p[:k]), App)]
    for q in positions(below):
        if isinstance(subterm_at(below, q), App):
            result.append(p + q)
    return result


class Substitution:
    """A finite map from variables to terms.

    Identity bindings are never stored, so the identity substitution is the
    empty map. Application is simultaneous (one pass over the term).
    """

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Optional[Mapping] = None) -> None:
        self._bindings = {v: t for v, t in (bindings or {}).items() if v != t}

    def apply(self, t: Term) -> Term:
        """Apply the substitution to a term."""
        if not self._bindings:
            return t
        return self._apply(t)

    def _apply(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self._bindings.get(t, t)
        if not t.args:
            return t
        args = tuple(self._apply(a) for a in t.args)
        if all(new is old for new, old in zip(args, t.args)):
            return t
        return App(t.symbol, args)

    def apply_rule(self, rule: Union[Rule, FRule]) -> Union[Rule, FRule]:
        """Apply the substitution to both sides of a rule."""
        return type(rule)(self.apply(rule.lhs), self.apply(rule.rhs))

    def items(self):
        return self._bindings.items()

    def get(self, v: Var, default=None):
        return self._bindings.get(v, default)

    def __getitem__(self, v: Var) -> Term:
        return self._bindings[v]

    def __contains__(self, v: object) -> bool:
        return v in self._bindings

    def __iter__(self) -> Iterator[Var]:
        return iter(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __bool__(self) -> bool:
        return bool(self._bindings)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Substitution):
            return self._bindings == other._bindings
        if isinstance(other, Mapping):
            return self._bindings == Substitution(other)._bindings
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __repr__(self) -> str:
        return f"Substitution({format_substitution(self)})"


class VarSupply:
    """Monotone source of variable identifiers never issued before."""

    def __init__(self, start: int = 0) -> None:
        self._next = start

    def fresh(self) -> Var:
        """Draw a fresh variable."""
        var = Var(self._next)
        self._next += 1
        return var

    def reserve(self, *objects) -> None:
        """Advance past every variable identifier occurring in the given objects.

        Accepts terms, rules, F#-rules, syntactic loops and TRSs.
        """
        for term in _terms_of(objects):
            for v in iter_variables(term):
                if v.id >= self._next:
                    self._next = v.id + 1


def _terms_of(objects) -> Iterator[Term]:
    for obj in objects:
        if isinstance(obj, (Var, App)):
            yield obj
        elif isinstance(obj, (Rule, FRule)):
            yield obj.lhs
            yield obj.rhs
        elif isinstance(obj, SyntacticLoop):
            yield from _terms_of(obj.rules)
        elif isinstance(obj, TRS):
            yield from _terms_of(obj.rules)
        elif isinstance(obj, (list, tuple)):
            yield from _terms_of(obj)
        else:
            raise TypeError(f"cannot collect variables of {type(obj).__name__}")


def rename_apart(rule: Union[Rule, FRule], supply: VarSupply) -> Union[Rule, FRule]:
    """Return a variant of rule whose variables are all freshly drawn.

    Variables are renamed consistently; a ground rule is returned as is.
    """
    names = _ordered_variables([rule.lhs, rule.rhs])
    if not names:
        return rule
    renaming = Substitution({v: supply.fresh() for v in names})
    return renaming.apply_rule(rule)


def _ordered_variables(terms: Iterable[Term]) -> list:
    seen: dict = {}
    for t in terms:
        for v in iter_variables(t):
            seen.setdefault(v, None)
    return list(seen)


def canonical_form(x) -> Union[str, tuple]:
    """Return a value identifying a rule, or a loop, modulo variable renaming.

    For a rule, variables are numbered by first occurrence (left-hand side
    first) and the result is its printed form. For a syntactic loop (or a
    sequence of rules) the result is the sorted tuple of its canonical rule
    forms, so loops made of the same rules in any order or rotation compare
    equal.
    """
    if isinstance(x, (Rule, FRule)):
        names = _ordered_variables([x.lhs, x.rhs])
        table = {v: f"v{i}" for i, v in enumerate(names)}
        return f"{format_term(x.lhs, table)} -> {format_term(x.rhs, table)}"
    if isinstance(x, SyntacticLoop):
        return x.key
    return tuple(sorted(canonical_form(rule) for rule in x))


def format_term(t: Term, names: Optional[Mapping] = None) -> str:
    """Render a term as ``f(a,b)``; tuple symbols get a trailing ``#``.

    Args:
        t: Term to render
        names: Optional display names for variables; others print as ``v<N>``
    """
    if isinstance(t, Var):
        if names is not None and t in names:
            return names[t]
        return f"v{t.id}"
    if not t.args:
        return str(t.symbol)
    inner = ",".join(format_term(a, names) for a in t.args)
    return f"{t.symbol}({inner})"


def format_rule(rule: Union[Rule, FRule], names: Optional[Mapping] = None) -> str:
    """Render a rule as ``l -> r``."""
    return f"{format_term(rule.lhs, names)} -> {format_term(rule.rhs, names)}"


def format_substitution(theta: Substitution, names: Optional[Mapping] = None) -> str:
    """Render a substitution as ``{x/t, ...}``; the identity is ``{}``."""
    items = sorted(theta.items(), key=lambda item: item[0].id)
    body = ", ".join(
        f"{format_term(v, names)}/{format_term(t, names)}" for v, t in items
    )
    return "{" + body + "}"


class NameAllocator:
    """Assigns readable display names (x, y, z, u, w, x1, ...) to variables."""

    BASE_NAMES = ("x", "y", "z", "u", "w")

    def __init__(
        self, preferred: Optional[Mapping] = None, reserved: Iterable[str] = ()
    ) -> None:
        """Initialize the allocator.

        Args:
            preferred: Optional names to reuse for known variables (e.g. the
                       names a TRS file gave them)
            reserved: Names never handed out, such as function symbols
        """
        self.names: dict = {}
        self._preferred = dict(preferred or {})
        self._used: set = set(reserved)
        self._generator = self._candidates()

    @classmethod
    def _candidates(cls) -> Iterator[str]:
        yield from cls.BASE_NAMES
        for n in itertools.count(1):
            for base in cls.BASE_NAMES:
                yield f"{base}{n}"

    def name(self, v: Var) -> str:
        """Return the display name of a variable, allocating one if needed."""
        if v in self.names:
            return self.names[v]
        wanted = self._preferred.get(v.id) or self._preferred.get(v)
        if not wanted or wanted in self._used:
            wanted = next(n for n in self._generator if n not in self._used)
        self.names[v] = wanted
        self._used.add(wanted)
        return wanted

    def names_for(self, *terms: Term) -> dict:
        """Allocate names for every variable of the given terms, in order."""
        for v in _ordered_variables(terms):
            self.name(v)
        return self.names
