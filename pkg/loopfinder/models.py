"""Domain models for loopfinder."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Optional, Union


class SymbolKind(Enum):
    """Distinguishes plain function symbols from their tuple (#-marked) copies."""

    PLAIN = "plain"
    TUPLE = "tuple"


class Strategy(Enum):
    """Selection strategy for disagreement positions."""

    ALL = "all"
    LM = "lm"
    LMNE = "lmne"

    @classmethod
    def from_name(cls, name: str) -> "Strategy":
        """Convert a strategy name to a Strategy enum value.

        Accepts both the short names (``all``, ``lm``, ``lmne``) and the
        ``select_``-prefixed spellings.

        Args:
            name: Strategy name

        Returns:
            Corresponding Strategy value

        Raises:
            ValueError: If the name is not a known strategy
        """
        key = (name or "").strip().lower()
        if key.startswith("select_"):
            key = key[len("select_") :]
        for strategy in cls:
            if strategy.value == key:
                return strategy
        raise ValueError(f"unknown strategy: {name!r} (expected all, lm or lmne)")


class LoopCriterion(Enum):
    """Test applied to compressed singleton loops."""

    SEMI_UNIFICATION = "semi-unification"
    MATCH_UNIFY = "match-unify"

    @classmethod
    def from_name(cls, name: str) -> "LoopCriterion":
        """Convert a criterion name to a LoopCriterion enum value.

        Raises:
            ValueError: If the name is not a known criterion
        """
        key = (name or "").strip().lower()
        for criterion in cls:
            if criterion.value == key:
                return criterion
        raise ValueError(
            f"unknown criterion: {name!r} (expected semi-unification or match-unify)"
        )


@dataclass(frozen=True)
class Symbol:
    """A function symbol of the signature."""

    name: str
    arity: int
    kind: SymbolKind = SymbolKind.PLAIN

    def __post_init__(self) -> None:
        """Validate the symbol after initialization."""
        if not self.name:
            raise ValueError("symbol name is required")
        if self.arity < 0:
            raise ValueError(f"arity of {self.name} must be non-negative")

    @property
    def is_tuple(self) -> bool:
        """Check if this is a tuple symbol."""
        return self.kind is SymbolKind.TUPLE

    def marked(self) -> "Symbol":
        """Return the tuple symbol f# of this plain symbol f.

        Raises:
            ValueError: If the symbol is already a tuple symbol
        """
        if self.is_tuple:
            raise ValueError(f"symbol {self} is already a tuple symbol")
        return Symbol(self.name, self.arity, SymbolKind.TUPLE)

    def unmarked(self) -> "Symbol":
        """Return the plain symbol f of this tuple symbol f#."""
        if not self.is_tuple:
            raise ValueError(f"symbol {self} is not a tuple symbol")
        return Symbol(self.name, self.arity, SymbolKind.PLAIN)

    def __str__(self) -> str:
        return f"{self.name}#" if self.is_tuple else self.name


@dataclass(frozen=True)
class Var:
    """A variable, identified by a globally unique integer."""

    id: int

    def __str__(self) -> str:
        return f"v{self.id}"


@dataclass(frozen=True)
class App:
    """Application of a symbol to a sequence of argument terms."""

    symbol: Symbol
    args: tuple = ()

    def __post_init__(self) -> None:
        """Validate the arity and freeze the argument sequence."""
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))
        if len(self.args) != self.symbol.arity:
            raise ValueError(
                f"symbol {self.symbol} has arity {self.symbol.arity} "
                f"but is applied to {len(self.args)} arguments"
            )

    def __str__(self) -> str:
        if not self.args:
            return str(self.symbol)
        return f"{self.symbol}({','.join(str(a) for a in self.args)})"


Term = Union[Var, App]


def root(t: Term) -> Optional[Symbol]:
    """Return the root symbol of a term, or None (the bottom marker) for variables."""
    return t.symbol if isinstance(t, App) else None


def iter_variables(t: Term) -> Iterator[Var]:
    """Yield the variable occurrences of a term in left-to-right pre-order."""
    stack = [t]
    while stack:
        current = stack.pop()
        if isinstance(current, Var):
            yield current
        else:
            stack.extend(reversed(current.args))


def variables(t: Term) -> set[Var]:
    """Return the set of variables occurring in a term."""
    return set(iter_variables(t))


def mark(t: Term) -> App:
    """Return t# by replacing the root symbol with its tuple symbol."""
    if not isinstance(t, App):
        raise ValueError("a variable cannot be marked")
    return App(t.symbol.marked(), t.args)


def unmark(t: Term) -> App:
    """Return the plain term whose marked form is t."""
    if not isinstance(t, App) or not t.symbol.is_tuple:
        raise ValueError(f"{t} is not a tuple-rooted term")
    return App(t.symbol.unmarked(), t.args)


@dataclass(frozen=True)
class Rule:
    """A rewrite rule l -> r over plain symbols."""

    lhs: Term
    rhs: Term

    def __post_init__(self) -> None:
        """Validate the rewrite rule conditions."""
        if isinstance(self.lhs, Var):
            raise ValueError(f"left-hand side of {self} is a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            names = ", ".join(sorted(str(v) for v in extra))
            raise ValueError(
                f"variables {names} of the right-hand side of {self} "
                f"do not occur in its left-hand side"
            )

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class FRule:
    """An F#-rule: both sides are rooted by tuple symbols.

    Unlike Rule, the right-hand side may contain variables that do not
    occur in the left-hand side.
    """

    lhs: App
    rhs: App

    def __post_init__(self) -> None:
        """Validate that both sides are tuple-rooted."""
        for side, term in (("left", self.lhs), ("right", self.rhs)):
            if not isinstance(term, App) or not term.symbol.is_tuple:
                raise ValueError(f"{side}-hand side of {self} is not tuple-rooted")

    def __str__(self) -> str:
        return f"{self.lhs} -> {self.rhs}"


@dataclass(frozen=True)
class SyntacticLoop:
    """A syntactic loop: F#-rules connectable in cyclic order.

    ``key`` identifies loops consisting of the same rules modulo variable
    renaming; it is computed by ``terms.canonical_form``.
    """

    rules: tuple
    key: tuple = field(compare=False)

    def __len__(self) -> int:
        return len(self.rules)

    @property
    def is_singleton(self) -> bool:
        """Check if the loop consists of a single rule."""
        return len(self.rules) == 1

    def __str__(self) -> str:
        return "[" + ", ".join(str(r) for r in self.rules) + "]"


@dataclass(frozen=True)
class TRS:
    """A term rewrite system: an ordered sequence of rules with its signature."""

    rules: tuple
    signature: frozenset
    var_names: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self) -> None:
        """Validate signature consistency."""
        arities: dict[str, int] = {}
        for symbol in self.signature:
            if symbol.is_tuple:
                raise ValueError(f"tuple symbol {symbol} in TRS signature")
            known = arities.setdefault(symbol.name, symbol.arity)
            if known != symbol.arity:
                raise ValueError(
                    f"symbol {symbol.name} used with arities {known} and {symbol.arity}"
                )

    @classmethod
    def from_rules(cls, rules, var_names: Optional[dict] = None) -> "TRS":
        """Build a TRS whose signature is the set of symbols occurring in its rules.

        Args:
            rules: Iterable of Rule objects
            var_names: Optional display names for variable identifiers

        Returns:
            TRS object

        Raises:
            ValueError: If a symbol is used with inconsistent arities
        """
        rules = tuple(rules)
        signature = set()
        for rule in rules:
            for side in (rule.lhs, rule.rhs):
                stack = [side]
                while stack:
                    t = stack.pop()
                    if isinstance(t, App):
                        signature.add(t.symbol)
                        stack.extend(t.args)
        return cls(rules, frozenset(signature), dict(var_names or {}))

    def __len__(self) -> int:
        return len(self.rules)


class PositionError(IndexError):
    """Raised when a position does not belong to a term."""


@dataclass(frozen=True)
class ParseIssue:
    """A single problem found while reading a TRS file."""

    message: str
    line: int
    column: int
    rule: Optional[str] = None

    def __str__(self) -> str:
        location = f"line {self.line}, column {self.column}"
        if self.rule:
            return f"{location}: {self.message} (rule {self.rule})"
        return f"{location}: {self.message}"


class TRSParseError(ValueError):
    """Raised when a TRS file cannot be read; carries every issue found."""

    def __init__(self, issues: list) -> None:
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class UnfoldContractError(ValueError):
    """Raised when an unfolding operator is called outside its precondition."""
