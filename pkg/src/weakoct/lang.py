"""Mini imperative language: AST and parser.

Grammar (statements end with ';', blocks use braces, '#' starts a comment)::

    program  : decl* stmt*
    decl     : 'var' ident (',' ident)* ';'
    stmt     : ident ':=' rhs ';'
             | 'havoc' ident ';'
             | 'assume' cond ';'
             | 'assert' cond ';'
             | 'if' cond '{' stmt* '}' ('else' '{' stmt* '}')?
             | 'while' cond '{' stmt* '}'
    rhs      : '?' | expr
    expr     : term (('+' | '-' | '*') term)*
    term     : ('+' | '-')? (ident | rational)
    cond     : term term? relop rational'
    relop    : '<=' | '<' | '>=' | '>' | '=='

Only octagonal shapes are analyzable exactly: right-hand sides of the form
constant / ±y / ±y ± c, and conditions over one or two ±variable terms
against a constant.  Anything else still parses, but is marked non-octagonal
so the analyzer can approximate it (havoc the target, skip the condition)
with a warning instead of failing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core import ParseError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|\#[^\n]*)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<op>:=|<=|>=|==|!=|<|>|[+\-*;,{}()?])
    """,
    re.VERBOSE,
)

KEYWORDS = {"var", "havoc", "assume", "assert", "if", "else", "while"}


@dataclass(frozen=True)
class Token:
    kind: str  # "num" | "ident" | "op" | "kw" | "eof"
    text: str
    line: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line = 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line)
        pos = m.end()
        chunk = m.group(0)
        if m.lastgroup == "ws":
            line += chunk.count("\n")
            continue
        kind = m.lastgroup
        if kind == "ident" and chunk in KEYWORDS:
            kind = "kw"
        tokens.append(Token(kind, chunk, line))
    tokens.append(Token("eof", "", line))
    return tokens


# -- AST -------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """One ±ident or ±rational atom of an expression."""

    sign: int  # +1 or -1
    var: str | None
    value: Fraction | None


@dataclass(frozen=True)
class Expr:
    """Sum/product chain, kept verbatim for diagnostics."""

    terms: tuple[Term, ...]
    ops: tuple[str, ...]  # between consecutive terms
    text: str

    def octagonal_rhs(self) -> tuple[int, str, Fraction] | Fraction | None:
        """Classify as an exact assignment right-hand side.

        Returns a constant, or (sign, var, offset) for ±y + c, or None when
        the expression is not octagonal (products, two variables, ...).
        """
        if "*" in self.ops:
            return None
        consts = Fraction(0)
        var_term: tuple[int, str] | None = None
        for i, term in enumerate(self.terms):
            eff = term.sign
            if i > 0 and self.ops[i - 1] == "-":
                eff = -eff
            if term.var is None:
                consts += eff * term.value
            elif var_term is None:
                var_term = (eff, term.var)
            else:
                return None
        if var_term is None:
            return consts
        return (var_term[0], var_term[1], consts)


@dataclass(frozen=True)
class Cond:
    """Comparison of a one- or two-term sum against a constant."""

    terms: tuple[tuple[int, str], ...]  # (sign, var), 1 or 2 entries
    op: str  # <= < >= > ==
    const: Fraction
    text: str
    octagonal: bool = True


@dataclass(frozen=True)
class NonOctCond:
    text: str
    octagonal: bool = False


CondLike = Union[Cond, NonOctCond]


@dataclass(frozen=True)
class Assign:
    name: str
    expr: Expr | None  # None encodes the nondeterministic '?'
    line: int


@dataclass(frozen=True)
class Havoc:
    name: str
    line: int


@dataclass(frozen=True)
class Assume:
    cond: CondLike
    line: int


@dataclass(frozen=True)
class Assert:
    cond: CondLike
    line: int


@dataclass(frozen=True)
class If:
    cond: CondLike
    then_body: tuple[Stmt, ...]
    else_body: tuple[Stmt, ...]
    line: int


@dataclass(frozen=True)
class While:
    cond: CondLike
    body: tuple[Stmt, ...]
    line: int


Stmt = Union[Assign, Havoc, Assume, Assert, If, While]


@dataclass(frozen=True)
class Program:
    names: tuple[str, ...]
    body: tuple[Stmt, ...]


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.at = 0
        self.names: list[str] = []

    def peek(self) -> Token:
        return self.tokens[self.at]

    def next(self) -> Token:
        tok = self.tokens[self.at]
        self.at += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            raise ParseError(f"expected {want!r}, found {tok.text!r}", tok.line)
        return tok

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            return self.next()
        return None

    def program(self) -> Program:
        while self.accept("kw", "var"):
            self.decl()
        body = []
        while self.peek().kind != "eof":
            body.append(self.statement())
        return Program(tuple(self.names), tuple(body))

    def decl(self) -> None:
        while True:
            tok = self.expect("ident")
            if tok.text in self.names:
                raise ParseError(f"duplicate variable {tok.text!r}", tok.line)
            self.names.append(tok.text)
            if not self.accept("op", ","):
                break
        self.expect("op", ";")

    def check_declared(self, tok: Token) -> str:
        if tok.text not in self.names:
            raise ParseError(f"undeclared variable {tok.text!r}", tok.line)
        return tok.text

    def statement(self) -> Stmt:
        tok = self.next()
        if tok.kind == "ident":
            name = self.check_declared(tok)
            self.expect("op", ":=")
            if self.accept("op", "?"):
                self.expect("op", ";")
                return Assign(name, None, tok.line)
            expr = self.expr()
            self.expect("op", ";")
            return Assign(name, expr, tok.line)
        if tok.kind == "kw" and tok.text == "havoc":
            name = self.check_declared(self.expect("ident"))
            self.expect("op", ";")
            return Havoc(name, tok.line)
        if tok.kind == "kw" and tok.text in ("assume", "assert"):
            cond = self.cond()
            self.expect("op", ";")
            cls = Assume if tok.text == "assume" else Assert
            return cls(cond, tok.line)
        if tok.kind == "kw" and tok.text == "if":
            cond = self.cond()
            then_body = self.block()
            else_body: tuple[Stmt, ...] = ()
            if self.accept("kw", "else"):
                else_body = self.block()
            return If(cond, then_body, else_body, tok.line)
        if tok.kind == "kw" and tok.text == "while":
            cond = self.cond()
            body = self.block()
            return While(cond, body, tok.line)
        raise ParseError(f"unexpected token {tok.text!r}", tok.line)

    def block(self) -> tuple[Stmt, ...]:
        self.expect("op", "{")
        body = []
        while not self.accept("op", "}"):
            if self.peek().kind == "eof":
                raise ParseError("unterminated block", self.peek().line)
            body.append(self.statement())
        return tuple(body)

    def term(self) -> Term:
        sign = +1
        if self.accept("op", "+"):
            sign = +1
        elif self.accept("op", "-"):
            sign = -1
        tok = self.next()
        if tok.kind == "ident":
            return Term(sign, self.check_declared(tok), None)
        if tok.kind == "num":
            return Term(sign, None, Fraction(tok.text))
        raise ParseError(f"expected variable or number, found {tok.text!r}", tok.line)

    def expr(self) -> Expr:
        start = self.at
        terms = [self.term()]
        ops = []
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in ("+", "-", "*"):
                self.next()
                ops.append(tok.text)
                terms.append(self.term())
            else:
                break
        text = " ".join(t.text for t in self.tokens[start : self.at])
        return Expr(tuple(terms), tuple(ops), text)

    def cond(self) -> CondLike:
        start = self.at
        terms = [self.term()]
        ops = []
        while True:
            tok = self.peek()
            if tok.kind == "op" and tok.text in ("+", "-", "*"):
                self.next()
                ops.append(tok.text)
                terms.append(self.term())
            else:
                break
        op_tok = self.next()
        if op_tok.kind != "op" or op_tok.text not in ("<=", "<", ">=", ">", "==", "!="):
            raise ParseError(f"expected comparison, found {op_tok.text!r}", op_tok.line)
        rsign = +1
        if self.accept("op", "-"):
            rsign = -1
        else:
            self.accept("op", "+")
        num_tok = self.expect("num")
        const = rsign * Fraction(num_tok.text)
        text = " ".join(t.text for t in self.tokens[start : self.at])
        if "*" in ops or len(terms) > 2 or op_tok.text == "!=":
            return NonOctCond(text)
        expr_terms: list[tuple[int, str]] = []
        for i, term in enumerate(terms):
            if term.var is None:
                return NonOctCond(text)
            eff = term.sign
            if i > 0 and ops[i - 1] == "-":
                eff = -eff
            expr_terms.append((eff, term.var))
        return Cond(tuple(expr_terms), op_tok.text, const, text)


def parse_program(text: str) -> Program:
    """Parse source text; raises :class:`ParseError` with a line number."""
    return _Parser(tokenize(text)).program()
