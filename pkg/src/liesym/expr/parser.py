"""Pratt parser for the expression grammar.

Grammar summary::

    expr    := expr ('+'|'-'|'*'|'/') expr | expr '^' expr | '-' expr
             | number | symbol | jet | 'exp' '(' linear-form ')'
             | func '(' args ')' | func"'"... '(' args ')'
             | 'D' '[' func (',' slot)* ']' [ '(' args ')' ]
             | '(' expr ')'

Jets are identifiers with an underscore suffix (``u_xt``); function
derivatives use ``D[f,x,u](x,u)`` with slot names taken from the function's
declared formals.  When the argument list is omitted the formals themselves
are used as arguments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .core import App, Expression, Sym, exp_of, linear_form_coefficients
from .errors import ArityError, ExpressionError, ParseError, TranscendentalError, UnknownSymbolError
from .symbols import Kind, SymbolTable

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9']*(?:_[A-Za-z]+)?)|(?P<op>[-+*/^()\[\],]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "name", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(Token("end", "", n))
    return tokens


_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}
_UNARY = 25


class _Parser:
    def __init__(self, text: str, table: SymbolTable) -> None:
        self.text = text
        self.table = table
        self.tokens = tokenize(text)
        self.i = 0

    # -- token plumbing ---------------------------------------------------
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op: str) -> Token:
        tok = self.next()
        if tok.kind != "op" or tok.text != op:
            found = tok.text or "end of input"
            raise ParseError(f"expected {op!r}, found {found!r}", tok.pos, self.text)
        return tok

    def error(self, message: str, tok: Token) -> ParseError:
        return ParseError(message, tok.pos, self.text)

    # -- Pratt core -------------------------------------------------------
    def parse(self) -> Expression:
        e = self.expr(0)
        tok = self.peek()
        if tok.kind != "end":
            raise self.error(f"unexpected {tok.text!r}", tok)
        return e

    def expr(self, rbp: int) -> Expression:
        left = self.nud(self.next())
        while True:
            tok = self.peek()
            lbp = _BINARY.get(tok.text, 0) if tok.kind == "op" else 0
            if lbp <= rbp:
                return left
            self.next()
            left = self.led(tok, left)

    def led(self, tok: Token, left: Expression) -> Expression:
        op = tok.text
        if op == "^":
            right = self.expr(_BINARY["^"] - 1)
            if not right.is_constant() or right.constant_value().denominator != 1:
                raise self.error("exponent must be an integer constant", tok)
            try:
                return left ** int(right.constant_value())
            except ExpressionError as exc:
                raise self.error(str(exc), tok) from None
        right = self.expr(_BINARY[op])
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if right.is_zero():
            raise self.error("division by zero", tok)
        try:
            return left / right
        except ExpressionError as exc:
            raise self.error(str(exc), tok) from None

    def nud(self, tok: Token) -> Expression:
        if tok.kind == "num":
            return Expression.const(Fraction(int(tok.text)))
        if tok.kind == "op":
            if tok.text == "-":
                return -self.expr(_UNARY)
            if tok.text == "+":
                return self.expr(_UNARY)
            if tok.text == "(":
                e = self.expr(0)
                self.expect(")")
                return e
            raise self.error(f"unexpected {tok.text!r}", tok)
        if tok.kind == "name":
            return self.name(tok)
        raise self.error("unexpected end of input", tok)

    # -- names ------------------------------------------------------------
    def name(self, tok: Token) -> Expression:
        text = tok.text
        if "_" in text:
            dep, letters = text.split("_", 1)
            if dep not in self.table.dependents:
                raise UnknownSymbolError(f"unknown dependent variable {dep!r}", tok.pos, self.text)
            try:
                return Expression.of(self.table.jet(dep, letters))
            except ExpressionError as exc:
                raise self.error(str(exc), tok) from None
        if text == "exp" and "exp" not in self.table:
            return self.exp(tok)
        if text == "D" and self.peek().text == "[":
            return self.derivative(tok)
        symbol = self.table.get(text)
        if symbol is None:
            base = text.rstrip("'")
            primes = len(text) - len(base)
            base_symbol = self.table.get(base)
            if primes and base_symbol is not None and base_symbol.kind is Kind.FUNCTION:
                if base_symbol.arity != 1:
                    raise ArityError(f"{base}{chr(39) * primes}: primes need a unary function")
                args = self.arguments(tok, base_symbol.arity)
                return Expression.of(App(base, base_symbol.formals, args, (primes,)))
            raise UnknownSymbolError(f"unknown symbol {text!r}", tok.pos, self.text)
        if symbol.kind is Kind.FUNCTION:
            args = self.arguments(tok, symbol.arity)
            return Expression.of(App(text, symbol.formals, args))
        return Expression.of(Sym(text))

    def arguments(self, tok: Token, arity: int) -> list[Expression]:
        if self.peek().text != "(":
            raise self.error(f"function {tok.text} needs an argument list", self.peek())
        self.next()
        args = [self.expr(0)]
        while self.peek().text == ",":
            self.next()
            args.append(self.expr(0))
        self.expect(")")
        if len(args) != arity:
            raise ArityError(
                f"{tok.text} takes {arity} argument(s), got {len(args)} (position {tok.pos})"
            )
        return args

    def exp(self, tok: Token) -> Expression:
        self.expect("(")
        arg = self.expr(0)
        self.expect(")")
        try:
            form = linear_form_coefficients(arg)
        except TranscendentalError as exc:
            raise TranscendentalError(f"{exc} (position {tok.pos})") from None
        for n in form:
            kind = self.table[n].kind
            if kind not in (Kind.COORDINATE, Kind.PARAMETER):
                raise TranscendentalError(f"exp may only mention coordinates or parameters, not {n}")
        return exp_of(form)

    def derivative(self, tok: Token) -> Expression:
        self.expect("[")
        ftok = self.next()
        symbol = self.table.get(ftok.text) if ftok.kind == "name" else None
        if symbol is None or symbol.kind is not Kind.FUNCTION:
            raise UnknownSymbolError(f"unknown function {ftok.text!r}", ftok.pos, self.text)
        orders = [0] * symbol.arity
        while self.peek().text == ",":
            self.next()
            stok = self.next()
            if stok.kind == "num":
                slot = int(stok.text) - 1
                if not 0 <= slot < symbol.arity:
                    raise self.error(f"slot {stok.text} out of range for {symbol.name}", stok)
            elif stok.text in symbol.formals:
                slot = symbol.formals.index(stok.text)
            else:
                raise self.error(f"{symbol.name} has no slot named {stok.text!r}", stok)
            orders[slot] += 1
        self.expect("]")
        if self.peek().text == "(":
            args = self.arguments(ftok, symbol.arity)
        else:
            args = []
            for f in symbol.formals:
                if f not in self.table or self.table[f].kind is Kind.FUNCTION:
                    raise self.error(
                        f"D[{symbol.name},...] needs arguments: formal {f!r} is not a declared symbol",
                        tok,
                    )
                args.append(Expression.of(Sym(f)))
        return Expression.of(App(symbol.name, symbol.formals, args, tuple(orders)))


def parse(text: str, table: SymbolTable) -> Expression:
    """Parse ``text`` into a canonical expression using the symbols in ``table``."""
    return _Parser(text, table).parse()
