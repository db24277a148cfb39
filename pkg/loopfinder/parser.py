"""Reader and printer for TRS files in the TPDB old-style format.

Supported sections are ``(VAR ...)``, ``(RULES ...)``, ``(COMMENT ...)``
and ``(STRATEGY FULL)``. Anything else is reported as an error rather
than skipped.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Union

from .models import (
    TRS,
    App,
    FRule,
    ParseIssue,
    Rule,
    Symbol,
    SymbolKind,
    Term,
    TRSParseError,
    Var,
)
from .terms import NameAllocator, VarSupply, format_rule

logger = logging.getLogger(__name__)

_TOKEN_PATTERN = re.compile(
    r"(?P<space>\s+)"
    r"|(?P<relative>->=)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[(),])"
    r"|(?P<ident>(?:(?!->)[^\s(),])+)"
)


@dataclass(frozen=True)
class Token:
    """A lexical token with its 1-based source location."""

    kind: str
    text: str
    line: int
    column: int
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.text)


def tokenize(text: str) -> list:
    """Split text into tokens, dropping whitespace."""
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_PATTERN.finditer(text):
        kind = m.lastgroup
        if kind != "space":
            tokens.append(
                Token(kind, m.group(), line, m.start() - line_start + 1, m.start())
            )
        newlines = m.group().count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + m.group().rindex("\n") + 1
    return tokens


class _Abort(Exception):
    """Stops reading after a syntax error has been recorded."""


class _TermParser:
    """Recursive-descent term reader over a token list."""

    def __init__(
        self,
        text: str,
        variables: set,
        supply: VarSupply,
        arities: dict,
        allow_tuple: bool,
    ) -> None:
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0
        self.variables = variables
        self.supply = supply
        self.arities = arities
        self.allow_tuple = allow_tuple
        self.issues: list = []
        self.scope: dict = {}
        self.var_names: dict = {}

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        token = self.peek()
        if token is None:
            self.fail_at_end("unexpected end of input")
        self.pos += 1
        return token

    def at(self, text: str) -> bool:
        token = self.peek()
        return token is not None and token.text == text

    def fail(self, token: Token, message: str) -> None:
        self.issues.append(ParseIssue(message, token.line, token.column))
        raise _Abort()

    def fail_at_end(self, message: str) -> None:
        lines = self.text.split("\n")
        self.issues.append(ParseIssue(message, len(lines), len(lines[-1]) + 1))
        raise _Abort()

    def expect(self, text: str) -> Token:
        token = self.peek()
        if token is None:
            self.fail_at_end(f"expected '{text}' but reached end of input")
        if token.text != text:
            self.fail(token, f"expected '{text}' but found '{token.text}'")
        self.pos += 1
        return token

    def variable(self, name: str) -> Var:
        var = self.scope.get(name)
        if var is None:
            var = self.supply.fresh()
            self.scope[name] = var
            self.var_names[var.id] = name
        return var

    def term(self) -> Term:
        token = self.advance()
        if token.kind != "ident":
            self.fail(token, f"expected a term but found '{token.text}'")
        name = token.text
        if name in self.variables:
            if self.at("("):
                self.fail(token, f"variable {name} cannot take arguments")
            return self.variable(name)

        kind = SymbolKind.PLAIN
        if name.endswith("#") and len(name) > 1:
            if not self.allow_tuple:
                self.issues.append(
                    ParseIssue(
                        f"tuple symbol {name} is not allowed in a TRS",
                        token.line,
                        token.column,
                    )
                )
            else:
                name = name[:-1]
                kind = SymbolKind.TUPLE

        args = []
        if self.at("("):
            self.advance()
            if self.at(")"):
                self.advance()
            else:
                while True:
                    args.append(self.term())
                    if self.at(","):
                        self.advance()
                        continue
                    self.expect(")")
                    break

        known = self.arities.setdefault(name, len(args))
        if known != len(args):
            self.issues.append(
                ParseIssue(
                    f"symbol {name} used with arity {len(args)}, "
                    f"but earlier with arity {known}",
                    token.line,
                    token.column,
                )
            )
        return App(Symbol(name, len(args), kind), tuple(args))

    def source(self, start: Token) -> str:
        previous = self.tokens[self.pos - 1]
        return " ".join(self.text[start.offset : previous.end].split())


class _TRSReader(_TermParser):
    """Reads a whole TRS file section by section."""

    def __init__(self, text: str) -> None:
        super().__init__(text, set(), VarSupply(), {}, allow_tuple=False)
        self.rules: list = []
        self.all_names: dict = {}

    def read(self) -> TRS:
        try:
            while self.peek() is not None:
                self.section()
        except _Abort:
            pass
        if self.issues:
            logger.debug(f"Rejected TRS with {len(self.issues)} issue(s)")
            raise TRSParseError(self.issues)
        logger.debug(f"Parsed TRS with {len(self.rules)} rule(s)")
        return TRS.from_rules(self.rules, self.all_names)

    def section(self) -> None:
        self.expect("(")
        head = self.advance()
        name = head.text.upper()
        if name == "VAR":
            while not self.at(")"):
                token = self.advance()
                if token.kind != "ident":
                    self.fail(token, f"expected a variable name but found '{token.text}'")
                self.variables.add(token.text)
            self.expect(")")
        elif name == "RULES":
            while not self.at(")"):
                if self.peek() is None:
                    self.fail_at_end("unterminated RULES section")
                self.rule()
            self.expect(")")
        elif name == "COMMENT":
            self.skip_balanced()
        elif name == "STRATEGY":
            value = self.advance()
            if value.text.upper() != "FULL":
                self.issues.append(
                    ParseIssue(
                        f"strategy {value.text} is not supported (only FULL)",
                        value.line,
                        value.column,
                    )
                )
            self.skip_balanced()
        elif name == "THEORY":
            self.issues.append(
                ParseIssue("THEORY sections are not supported", head.line, head.column)
            )
            self.skip_balanced()
        else:
            self.issues.append(
                ParseIssue(f"unknown section {head.text}", head.line, head.column)
            )
            self.skip_balanced()

    def skip_balanced(self) -> None:
        """Skip to the parenthesis closing the current section."""
        depth = 1
        while depth:
            token = self.advance()
            if token.text == "(":
                depth += 1
            elif token.text == ")":
                depth -= 1

    def rule(self) -> None:
        start = self.peek()
        self.scope = {}
        self.var_names = {}
        lhs = self.term()
        arrow = self.advance()
        relative = arrow.kind == "relative"
        if not relative and arrow.kind != "arrow":
            self.fail(arrow, f"expected '->' but found '{arrow.text}'")
        rhs = self.term()
        text = self.source(start)
        if relative:
            self.issues.append(
                ParseIssue(
                    "relative rules (->=) are not supported",
                    arrow.line,
                    arrow.column,
                    text,
                )
            )
            return
        self.all_names.update(self.var_names)
        try:
            rule = Rule(lhs, rhs)
        except ValueError:
            if isinstance(lhs, Var):
                message = "left-hand side is a variable"
            else:
                message = "right-hand side has variables not in the left-hand side"
            self.issues.append(
                ParseIssue(
                    f"not a valid rewrite rule: {message}",
                    start.line,
                    start.column,
                    text,
                )
            )
            return
        self.rules.append(rule)


def parse_trs(text: str) -> TRS:
    """Parse a TRS in the TPDB old-style format.

    Variables are scoped per rule: the same name in two rules denotes two
    distinct variables. Symbols take their arity from their first use.

    Args:
        text: File contents

    Returns:
        TRS object

    Raises:
        TRSParseError: If the text is malformed, uses an unsupported
                       feature, or contains an invalid rule
    """
    return _TRSReader(text).read()


def read_trs_file(path: Union[str, Path]) -> TRS:
    """Read and parse a UTF-8 encoded .trs file.

    Raises:
        FileNotFoundError: If the file does not exist
        TRSParseError: If its contents cannot be parsed
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"TRS file not found: {path}")
    return parse_trs(path.read_text(encoding="utf-8"))


def format_trs(trs: TRS) -> str:
    """Print a TRS in the dialect accepted by parse_trs."""
    reserved = {symbol.name for symbol in trs.signature}
    declared: dict = {}
    lines = []
    for rule in trs.rules:
        allocator = NameAllocator(preferred=trs.var_names, reserved=reserved)
        names = allocator.names_for(rule.lhs, rule.rhs)
        declared.update(dict.fromkeys(names.values()))
        lines.append(f"  {format_rule(rule, names)}")
    header = []
    if declared:
        header.append("(VAR " + " ".join(declared) + ")")
    return "\n".join(header + ["(RULES"] + lines + [")"]) + "\n"


class TermReader:
    """Builds terms, rules and F#-rules from text.

    Identifiers listed as variables denote variables; a trailing ``#`` on a
    symbol denotes its tuple symbol. The variable table is shared between
    calls, so the same name always denotes the same variable.

    Example:
        >>> reader = TermReader("x y")
        >>> reader.frule("f#(s(x)) -> f#(x)")
    """

    def __init__(
        self, variables: Union[str, Iterable[str]] = (), supply: Optional[VarSupply] = None
    ) -> None:
        if isinstance(variables, str):
            variables = variables.split()
        self.variables = set(variables)
        self.supply = supply or VarSupply()
        self.arities: dict = {}
        self.scope: dict = {}

    def var(self, name: str) -> Var:
        """Return the variable denoted by name."""
        if name not in self.variables:
            raise ValueError(f"{name} is not a declared variable")
        return self.term(name)

    def term(self, text: str) -> Term:
        """Read a single term."""
        parser = self._parser(text)
        t = self._run(parser, parser.term)
        self._finish(parser)
        return t

    def rule(self, text: str) -> Rule:
        """Read a rewrite rule ``l -> r``."""
        lhs, rhs = self._sides(text)
        return Rule(lhs, rhs)

    def frule(self, text: str) -> FRule:
        """Read an F#-rule ``f#(...) -> g#(...)``."""
        lhs, rhs = self._sides(text)
        return FRule(lhs, rhs)

    def trs(self, *texts: str) -> TRS:
        """Build a TRS from rule texts."""
        return TRS.from_rules(self.rule(text) for text in texts)

    def _parser(self, text: str) -> _TermParser:
        parser = _TermParser(
            text, self.variables, self.supply, self.arities, allow_tuple=True
        )
        parser.scope = self.scope
        return parser

    def _sides(self, text: str) -> tuple:
        parser = self._parser(text)

        def read() -> tuple:
            lhs = parser.term()
            parser.expect("->")
            return lhs, parser.term()

        sides = self._run(parser, read)
        self._finish(parser)
        return sides

    @staticmethod
    def _run(parser: _TermParser, read):
        try:
            return read()
        except _Abort:
            raise TRSParseError(parser.issues)

    @staticmethod
    def _finish(parser: _TermParser) -> None:
        extra = parser.peek()
        if extra is not None:
            parser.issues.append(
                ParseIssue(
                    f"unexpected '{extra.text}' after the end",
                    extra.line,
                    extra.column,
                )
            )
        if parser.issues:
            raise TRSParseError(parser.issues)
