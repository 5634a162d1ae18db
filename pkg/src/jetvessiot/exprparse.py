"""Textual expressions: + - * / ^, parentheses, integer literals, identifiers.

Identifiers resolve against a Chart: independent variables, dependent
variables, parameters, and derivative coordinates written ``u_xy`` (dependent
name, underscore, a string of independent-variable names; repetition gives
multiplicity and the order of the letters is irrelevant).
"""

import re
from fractions import Fraction

from .expr import Expr


class ParseError(Exception):
    def __init__(self, message, line=1, col=1):
        super().__init__("%d:%d: %s" % (line, col, message))
        self.message = message
        self.line = line
        self.col = col


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)|(\*\*|[-+*/^()]))")


def tokenize(text, line=1, col0=1):
    toks = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            # skip whitespace to report the right column
            k = pos
            while k < len(text) and text[k].isspace():
                k += 1
            raise ParseError("unexpected character %r" % text[k], line, col0 + k)
        if mt.group(1):
            toks.append(("num", mt.group(1), col0 + mt.start(1)))
        elif mt.group(2):
            toks.append(("id", mt.group(2), col0 + mt.start(2)))
        else:
            op = mt.group(3)
            toks.append(("op", "^" if op == "**" else op, col0 + mt.start(3)))
        pos = mt.end()
    toks.append(("end", "", col0 + len(text)))
    return toks


def split_suffix(suffix, names):
    """Split a derivative suffix into independent-variable names; returns a
    list of indices (1-based) or None when no unique split exists."""
    memo = {}

    def go(pos):
        if pos == len(suffix):
            return [[]]
        if pos in memo:
            return memo[pos]
        out = []
        for k, nm in enumerate(names):
            if suffix.startswith(nm, pos):
                for rest in go(pos + len(nm)):
                    out.append([k + 1] + rest)
                    if len(out) > 1:
                        break
        memo[pos] = out
        return out

    res = go(0)
    if len(res) != 1:
        return None
    return res[0]


def parse_jet_name(chart, name, line=1, col=1):
    """(alpha, mu) for a dependent or derivative name, else ParseError."""
    if "_" in name:
        base, suffix = name.split("_", 1)
    else:
        base, suffix = name, ""
    if base not in chart.dep:
        raise ParseError("unknown dependent variable %r" % base, line, col)
    alpha = chart.dep.index(base) + 1
    mu = [0] * chart.n
    if suffix:
        parts = split_suffix(suffix, chart.indep)
        if parts is None:
            raise ParseError("malformed derivative suffix %r" % suffix, line, col + len(base) + 1)
        for k in parts:
            mu[k - 1] += 1
    return alpha, tuple(mu)


def resolve_identifier(chart, name, line=1, col=1, max_order=None):
    if name in chart.indep and "_" not in name:
        return chart.x(chart.indep.index(name) + 1)
    if name in chart.params:
        return chart.param(name)
    base = name.split("_", 1)[0]
    if base in chart.dep:
        alpha, mu = parse_jet_name(chart, name, line, col)
        if max_order is not None and sum(mu) > max_order:
            raise ParseError("derivative %s has order %d > %d" % (name, sum(mu), max_order), line, col)
        return chart.jet(alpha, mu)
    raise ParseError("unknown identifier %r" % name, line, col)


class _Parser:
    def __init__(self, toks, chart, line, max_order):
        self.toks = toks
        self.k = 0
        self.chart = chart
        self.line = line
        self.max_order = max_order

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2])

    def expect(self, op):
        t = self.peek()
        if t[0] != "op" or t[1] != op:
            self.fail("expected %r" % op)
        self.take()

    def expr(self):
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            right = self.term()
            left = left + right if op == "+" else left - right
        return left

    def term(self):
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            tok = self.take()
            right = self.unary()
            if tok[1] == "*":
                left = left * right
            else:
                if right.is_zero():
                    self.fail("division by zero", tok)
                left = left / right
        return left

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] == "-":
            self.take()
            return -self.unary()
        if t[0] == "op" and t[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e = self.exponent()
            if e < 0 and base.is_zero():
                self.fail("zero to a negative power", t)
            return base ** e
        return base

    def exponent(self):
        t = self.peek()
        sign = 1
        if t[0] == "op" and t[1] == "-":
            self.take()
            sign = -1
            t = self.peek()
        if t[0] == "num":
            self.take()
            return sign * int(t[1])
        if t[0] == "op" and t[1] == "(":
            self.take()
            e = self.exponent()
            self.expect(")")
            return sign * e
        self.fail("exponent must be an integer literal")

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return Expr.const(Fraction(int(t[1])))
        if t[0] == "id":
            return Expr.var(resolve_identifier(self.chart, t[1], self.line, t[2], self.max_order))
        if t[0] == "op" and t[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "end":
            self.fail("unexpected end of expression", t)
        self.fail("unexpected %r" % t[1], t)


def parse_expr(text, chart, line=1, col=1, max_order=None):
    toks = tokenize(text, line, col)
    p = _Parser(toks, chart, line, max_order)
    e = p.expr()
    if p.peek()[0] != "end":
        p.fail("unexpected %r" % p.peek()[1])
    return e
