"""Recursive-descent parser and canonical printer for the ASP fragment."""
from __future__ import annotations

import re
from typing import Iterable

from .errors import AspSyntaxError, UnsupportedConstruct
from .syntax import (
    Aggregate,
    AggregateElement,
    Atom,
    Comparison,
    Literal,
    Program,
    Rule,
    Variable,
)

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\f\v]+"),
    ("NL", r"\n"),
    ("COMMENT", r"%[^\n]*"),
    ("IF", r":-"),
    ("RANGE", r"\.\."),
    ("DOT", r"\."),
    ("OP", r"<>|!=|<=|>=|==|<|>|="),
    ("COLON", r":"),
    ("COMMA", r","),
    ("SEMI", r";"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("LBRACE", r"\{"),
    ("RBRACE", r"\}"),
    ("BAR", r"\|"),
    ("DIRECTIVE", r"#[a-zA-Z_]+"),
    ("NUMBER", r"-?\d+"),
    ("VARIABLE", r"[A-Z][A-Za-z0-9_']*"),
    ("ANON", r"_[A-Za-z0-9_']*"),
    ("IDENT", r"[a-z][A-Za-z0-9_']*"),
    ("ARITH", r"[+\-*/\\]"),
    ("STRING", r'"'),
    ("MISMATCH", r"."),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))
_OP_ALIASES = {"!=": "<>", "==": "="}


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}({self.text!r})@{self.line}:{self.col}"


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, line_start = 1, 0
    for m in _TOKEN_RE.finditer(text):
        kind = m.lastgroup
        col = m.start() - line_start + 1
        if kind == "NL":
            line += 1
            line_start = m.end()
            continue
        if kind in ("WS", "COMMENT"):
            continue
        if kind == "RANGE":
            raise UnsupportedConstruct("interval", line, col)
        if kind == "ANON":
            raise UnsupportedConstruct("anonymous variable", line, col)
        if kind == "BAR":
            raise UnsupportedConstruct("disjunctive head", line, col)
        if kind == "ARITH":
            raise UnsupportedConstruct("arithmetic term", line, col)
        if kind == "STRING":
            raise UnsupportedConstruct("string constant", line, col)
        if kind == "MISMATCH":
            raise AspSyntaxError(line, col, "a valid token", m.group())
        tokens.append(_Token(kind, m.group(), line, col))
    tokens.append(_Token("EOF", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    # -- helpers
    def peek(self, k: int = 0) -> _Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> _Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str, what: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise AspSyntaxError(tok.line, tok.col, what, tok.text)
        return self.next()

    def error(self, what: str):
        tok = self.peek()
        raise AspSyntaxError(tok.line, tok.col, what, tok.text)

    # -- grammar
    def program(self) -> Program:
        rules, facts = [], []
        while self.peek().kind != "EOF":
            r = self.statement()
            if r.head is not None and not r.body and r.head.is_ground():
                facts.append(r.head)
            else:
                rules.append(r)
        return Program(tuple(rules), tuple(facts))

    def statement(self) -> Rule:
        tok = self.peek()
        if tok.kind == "DIRECTIVE":
            raise UnsupportedConstruct(tok.text, tok.line, tok.col)
        if tok.kind == "LBRACE":
            raise UnsupportedConstruct("choice rule", tok.line, tok.col)
        head = None
        if tok.kind != "IF":
            head = self.atom()
            if self.peek().kind == "SEMI":
                t = self.peek()
                raise UnsupportedConstruct("disjunctive head", t.line, t.col)
        body: list = []
        if self.peek().kind == "IF":
            self.next()
            if self.peek().kind != "DOT":
                body = self.body()
        elif head is None:
            self.error("':-' or an atom")
        self.expect("DOT", "'.'")
        return Rule(head, tuple(body))

    def body(self) -> list:
        lits = [self.body_literal()]
        while self.peek().kind == "COMMA":
            self.next()
            lits.append(self.body_literal())
        return lits

    def body_literal(self):
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == "not":
            nxt = self.peek(1)
            if nxt.kind == "IDENT" and nxt.text == "not":
                raise UnsupportedConstruct("double negation", nxt.line, nxt.col)
            if nxt.kind in ("IDENT",):
                self.next()
                return Literal(self.atom(), True)
            if nxt.kind == "DIRECTIVE" or self._starts_guarded_aggregate(1):
                raise UnsupportedConstruct("negated aggregate", nxt.line, nxt.col)
        if tok.kind == "DIRECTIVE":
            return self.aggregate(None)
        # guard on the left of an aggregate: TERM OP #count{...}
        if tok.kind in ("NUMBER", "VARIABLE", "IDENT") and self.peek(1).kind == "OP" \
                and self.peek(2).kind == "DIRECTIVE":
            term = self.term()
            op = self.op()
            return self.aggregate((term, op))
        if tok.kind == "IDENT" and self.peek(1).kind != "OP":
            return Literal(self.atom(), False)
        if tok.kind in ("NUMBER", "VARIABLE", "IDENT"):
            lhs = self.term()
            op = self.op()
            rhs = self.term()
            return Comparison(lhs, op, rhs)
        self.error("a body literal")

    def _starts_guarded_aggregate(self, k: int) -> bool:
        return self.peek(k + 1).kind == "OP" and self.peek(k + 2).kind == "DIRECTIVE"

    def op(self) -> str:
        tok = self.expect("OP", "a comparison operator")
        return _OP_ALIASES.get(tok.text, tok.text)

    def aggregate(self, left):
        tok = self.next()
        if tok.text != "#count":
            raise UnsupportedConstruct(tok.text, tok.line, tok.col)
        self.expect("LBRACE", "'{'")
        elements = []
        if self.peek().kind != "RBRACE":
            elements.append(self.element())
            while self.peek().kind == "SEMI":
                self.next()
                elements.append(self.element())
        self.expect("RBRACE", "'}'")
        right = None
        if self.peek().kind == "OP":
            op = self.op()
            right = (op, self.term())
        if left is None and right is None:
            self.error("an aggregate guard")
        return Aggregate(tuple(elements), left, right)

    def element(self) -> AggregateElement:
        terms = [self.term()]
        while self.peek().kind == "COMMA":
            self.next()
            terms.append(self.term())
        cond: list = []
        if self.peek().kind == "COLON":
            self.next()
            cond.append(self.condition_literal())
            while self.peek().kind == "COMMA":
                self.next()
                cond.append(self.condition_literal())
        return AggregateElement(tuple(terms), tuple(cond))

    def condition_literal(self):
        tok = self.peek()
        if tok.kind == "DIRECTIVE":
            raise UnsupportedConstruct("nested aggregate", tok.line, tok.col)
        if tok.kind == "IDENT" and tok.text == "not" and self.peek(1).kind == "IDENT":
            self.next()
            return Literal(self.atom(), True)
        if tok.kind == "IDENT" and self.peek(1).kind != "OP":
            return Literal(self.atom(), False)
        if tok.kind in ("NUMBER", "VARIABLE", "IDENT"):
            lhs = self.term()
            op = self.op()
            return Comparison(lhs, op, self.term())
        self.error("a condition literal")

    def atom(self) -> Atom:
        name = self.expect("IDENT", "a predicate name").text
        args = []
        if self.peek().kind == "LPAREN":
            self.next()
            args.append(self.term())
            while self.peek().kind == "COMMA":
                self.next()
                args.append(self.term())
            self.expect("RPAREN", "')'")
        return Atom(name, tuple(args))

    def term(self):
        tok = self.peek()
        if tok.kind == "NUMBER":
            self.next()
            return int(tok.text)
        if tok.kind == "VARIABLE":
            self.next()
            return Variable(tok.text)
        if tok.kind == "IDENT":
            self.next()
            if self.peek().kind == "LPAREN":
                t = self.peek()
                raise UnsupportedConstruct("function term", t.line, t.col)
            return tok.text
        self.error("a term")


def parse_program(text: str) -> Program:
    """Parse program text into a :class:`Program`; ground facts are split off."""
    return _Parser(text).program()


def parse_rule(text: str) -> Rule:
    p = _Parser(text)
    r = p.statement()
    if p.peek().kind != "EOF":
        p.error("end of input")
    return r


def parse_atom(text: str) -> Atom:
    p = _Parser(text)
    a = p.atom()
    if p.peek().kind != "EOF":
        p.error("end of input")
    return a


def parse_atoms(line: str) -> list[Atom]:
    """Parse a whitespace-separated list of ground atoms (a model line)."""
    p = _Parser(line)
    out = []
    while p.peek().kind != "EOF":
        a = p.atom()
        if not a.is_ground():
            raise AspSyntaxError(p.peek().line, p.peek().col, "a ground atom", str(a))
        out.append(a)
    return out


def render_rule(r: Rule) -> str:
    return str(r)


def render_program(p: Program) -> str:
    """Canonical text: facts first, then rules, one statement per line."""
    lines = [f"{f}." for f in p.facts]
    lines.extend(str(r) for r in p.rules)
    return "".join(line + "\n" for line in lines)


def render_atoms(atoms: Iterable[Atom]) -> str:
    return " ".join(str(a) for a in sorted(atoms, key=Atom.sort_key))
