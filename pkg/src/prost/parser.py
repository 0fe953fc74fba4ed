"""Reader and writer for the PTRS text format.

    file      := ws (varsDecl)? "rules:" ruleList
    varsDecl  := "vars" ident+ ";"
    ruleList  := (rule ";")+
    rule      := term "->" "{" branch ("|" branch)* "}"   |   term "->" term
    branch    := rational ":" term
    rational  := integer ("/" integer)?
    term      := ident | ident "(" term ("," term)* ")"

Identifiers match [A-Za-z0-9_']+; "#" starts a comment to end of line. The
bare-term rule form is the classical TRS shape and is read as l -> {1: r}.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError
from .ptrs import MultiDistribution, ProbRule, Ptrs
from .terms import App, Symbol, Term, Var

_TOKEN = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<ident>[A-Za-z0-9_']+)
      | (?P<arrow>->)
      | (?P<punct>[(){},;:|/])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str):
    toks = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", line, col)
        kind = m.lastgroup
        chunk = m.group()
        if kind != "ws":
            if kind == "punct":
                kind = chunk
            toks.append(_Tok(kind, chunk, line, col))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = m.end()
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, var_names=None):
        self.toks = _tokenize(text)
        self.pos = 0
        self.vars = set(var_names or ())
        self.arities: dict = {}

    def peek(self) -> _Tok:
        return self.toks[self.pos]

    def next(self) -> _Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind, what=None) -> _Tok:
        t = self.next()
        if t.kind != kind:
            raise ParseError(
                f"expected {what or kind!r}, found {t.text or 'end of input'!r}",
                t.line,
                t.col,
            )
        return t

    def expect_keyword(self, word):
        t = self.next()
        if t.kind != "ident" or t.text != word:
            raise ParseError(
                f"expected {word!r}, found {t.text or 'end of input'!r}", t.line, t.col
            )

    # -- grammar ---------------------------------------------------------

    def file(self) -> Ptrs:
        if self.peek().kind == "ident" and self.peek().text == "vars":
            self.next()
            if self.peek().kind != "ident":
                t = self.peek()
                raise ParseError("expected at least one variable name", t.line, t.col)
            while self.peek().kind == "ident":
                self.vars.add(self.next().text)
            self.expect(";")
        self.expect_keyword("rules")
        self.expect(":")
        rules = []
        while True:
            rules.append(self.rule(len(rules)))
            self.expect(";")
            if self.peek().kind == "eof":
                break
        return Ptrs(rules, self.vars)

    def rule(self, index: int) -> ProbRule:
        lhs = self.term()
        self.expect("arrow", "'->'")
        if self.peek().kind == "{":
            self.next()
            branches = [self.branch()]
            while self.peek().kind == "|":
                self.next()
                branches.append(self.branch())
            self.expect("}")
        else:
            branches = [(Fraction(1), self.term())]
        return ProbRule(lhs, MultiDistribution(branches), index)

    def branch(self):
        p = self.rational()
        self.expect(":")
        return p, self.term()

    def rational(self) -> Fraction:
        t = self.expect("ident", "a rational number")
        if not t.text.isdigit():
            raise ParseError(f"expected an integer, found {t.text!r}", t.line, t.col)
        num = int(t.text)
        if self.peek().kind == "/":
            self.next()
            d = self.expect("ident", "an integer")
            if not d.text.isdigit():
                raise ParseError(f"expected an integer, found {d.text!r}", d.line, d.col)
            den = int(d.text)
            if den == 0:
                raise ParseError("zero denominator", d.line, d.col)
            return Fraction(num, den)
        return Fraction(num)

    def term(self) -> Term:
        t = self.expect("ident", "a term")
        name = t.text
        if self.peek().kind == "(":
            if name in self.vars:
                raise ParseError(f"variable {name} applied to arguments", t.line, t.col)
            self.next()
            args = [self.term()]
            while self.peek().kind == ",":
                self.next()
                args.append(self.term())
            self.expect(")")
            return App(self._symbol(name, len(args), t), tuple(args))
        if name in self.vars:
            return Var(name)
        return App(self._symbol(name, 0, t))

    def _symbol(self, name, arity, tok) -> Symbol:
        seen = self.arities.get(name)
        if seen is None:
            self.arities[name] = arity
        elif seen != arity:
            raise ParseError(
                f"symbol {name} used with arities {seen} and {arity}",
                tok.line,
                tok.col,
            )
        return Symbol(name, arity)


def parse_ptrs(text: str) -> Ptrs:
    """Parse the PTRS text format; validates all system invariants."""
    return _Parser(text).file()


def parse_term(text: str, p: Ptrs = None, variables=()) -> Term:
    """Parse a single term; identifiers in `variables` (or declared in `p`)
    are variables, everything else is a function symbol."""
    var_names = set(variables)
    if p is not None:
        var_names |= p.variables
    parser = _Parser(text, var_names)
    if p is not None:
        parser.arities.update({s.name: s.arity for s in p.signature.values()})
    t = parser.term()
    tok = parser.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


def render_ptrs(p: Ptrs) -> str:
    """Write a Ptrs back to the text format. parse_ptrs inverts this."""
    out = []
    used_vars = sorted({v for r in p.rules for v in _rule_vars(r)})
    if used_vars:
        out.append("vars " + " ".join(used_vars) + ";")
    out.append("rules:")
    for rule in p.rules:
        body = " | ".join(f"{p_}: {t}" for p_, t in rule.rhs)
        out.append(f"{rule.lhs} -> {{{body}}};")
    return "\n".join(out) + "\n"


def _rule_vars(rule: ProbRule):
    from .ptrs import terms_variables

    return terms_variables(rule)
