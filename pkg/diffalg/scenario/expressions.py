"""Polynomial expressions of the scenario language.

Grammar, lowest precedence first::

    expr   ::= term (('+' | '-') term)*
    term   ::= unary (('*' | '/') unary)*
    unary  ::= ('-' | '+') unary | power
    power  ::= atom ('^' INTEGER)?
    atom   ::= INTEGER | NAME | '(' expr ')'

Juxtaposition (``2X``, ``X Y``, ``X(Y+1)``) is rejected. Division is only
by nonzero constants, so printed rational coefficients read back.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass

from sympy.polys.rings import PolyElement, PolyRing

from diffalg.engine.core import variable_names
from diffalg.errors import ExpressionSyntaxError, UnknownVariableError

_TOKEN = re.compile(r"(?P<space>\s+)|(?P<number>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()])")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, line: int = 1, column: int = 1) -> list[Token]:
    tokens = []
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise ExpressionSyntaxError(f"unexpected character {text[position]!r}", line, column + position)
        if match.lastgroup != "space":
            tokens.append(Token(match.lastgroup, match.group(), line, column + position))
        position = match.end()
    tokens.append(Token("end", "", line, column + len(text)))
    return tokens


class ExpressionParser:
    def __init__(self, ring: PolyRing, text: str, line: int = 1, column: int = 1):
        self.ring = ring
        self.names = {name: g for name, g in zip(variable_names(ring), ring.gens)}
        self.tokens = tokenize(text, line, column)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def _advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def _error(self, message: str, token: Token | None = None) -> ExpressionSyntaxError:
        token = token or self.current
        return ExpressionSyntaxError(message, token.line, token.column)

    def _expect(self, text: str) -> Token:
        if self.current.text != text:
            found = self.current.text or "end of expression"
            raise self._error(f"expected {text!r}, found {found!r}")
        return self._advance()

    def parse(self) -> PolyElement:
        if self.current.kind == "end":
            raise self._error("empty expression")
        value = self._expr()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}")
        return value

    def _expr(self) -> PolyElement:
        value = self._term()
        while self.current.text in {"+", "-"}:
            op = self._advance().text
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> PolyElement:
        value = self._unary()
        while True:
            token = self.current
            if token.text == "*":
                self._advance()
                value = value * self._unary()
            elif token.text == "/":
                self._advance()
                divisor_token = self.current
                divisor = self._unary()
                if not divisor.is_ground or not divisor:
                    raise self._error("division is only by nonzero constants", divisor_token)
                K = self.ring.domain
                value = value.mul_ground(K.quo(K.one, divisor.LC))
            elif token.kind in {"number", "name"} or token.text == "(":
                raise self._error("implicit multiplication is not allowed; write '*'")
            else:
                return value

    def _unary(self) -> PolyElement:
        if self.current.text == "-":
            self._advance()
            return -self._unary()
        if self.current.text == "+":
            self._advance()
            return self._unary()
        return self._power()

    def _power(self) -> PolyElement:
        base = self._atom()
        if self.current.text != "^":
            return base
        self._advance()
        token = self.current
        if token.kind != "number":
            raise self._error("exponents are nonnegative integers")
        self._advance()
        return base ** int(token.text)

    def _atom(self) -> PolyElement:
        token = self.current
        if token.kind == "number":
            self._advance()
            return self.ring(int(token.text))
        if token.kind == "name":
            self._advance()
            if token.text not in self.names:
                raise UnknownVariableError(token.text)
            return self.names[token.text]
        if token.text == "(":
            self._advance()
            value = self._expr()
            self._expect(")")
            return value
        found = token.text or "end of expression"
        raise self._error(f"unexpected {found!r}")


def parse_polynomial(text: str, ring: PolyRing, line: int = 1, column: int = 1) -> PolyElement:
    """Read one expression as an element of the ambient ring; coefficients land in its field."""
    return ExpressionParser(ring, text, line, column).parse()


def split_list(text: str) -> list[str]:
    """Comma-separated items, each optionally double-quoted."""
    if not text.strip():
        return []
    row = next(csv.reader([text], skipinitialspace=True))
    return [item.strip() for item in row if item.strip()]


def split_items(text: str) -> list[tuple[str, int]]:
    """Like split_list, with the 0-based offset of every item in ``text``."""
    items, position = [], 0
    for item in split_list(text):
        offset = text.find(item, position)
        if offset < 0:
            offset = position
        items.append((item, offset))
        position = offset + len(item)
    return items


def parse_polynomials(text: str, ring: PolyRing, line: int = 1, column: int = 1) -> list[PolyElement]:
    """Comma-separated expressions; errors carry the column of ``text`` starting at ``column``."""
    return [parse_polynomial(item, ring, line, column + offset) for item, offset in split_items(text)]
