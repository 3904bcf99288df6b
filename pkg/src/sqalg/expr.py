"""Polynomials over F2 in named generators, and their text syntax.

A polynomial is a frozenset of exponent tuples, one slot per generator.
Grammar: ``+`` for sums, ``*`` for products, ``^`` for powers, parentheses,
alphanumeric names, and the constants 0 and 1.  Whitespace is ignored.
"""

from __future__ import annotations

import re
from typing import Sequence

from .errors import ParseError

Poly = frozenset

_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_]*)|(\d+)|([+*^()]))")


def _tokens(text: str):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise ParseError(f"unexpected character {text[col - 1]!r}", 1, col)
        start = m.start(m.lastindex) + 1
        out.append((m.lastindex, m.group(m.lastindex), start))
        pos = m.end()
    out.append((0, "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, names: Sequence[str]):
        self.toks = _tokens(text)
        self.i = 0
        self.names = list(names)
        self.pos = {n: j for j, n in enumerate(names)}
        self.one = (0,) * len(names)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, 1, tok[2])

    def parse(self) -> Poly:
        p = self.expr()
        if self.peek()[0] != 0:
            self.fail(f"unexpected {self.peek()[1]!r}")
        return p

    def expr(self) -> Poly:
        acc = set(self.term())
        while self.peek()[1] == "+":
            self.take()
            acc ^= self.term()
        return frozenset(acc)

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = poly_mul(acc, self.factor())
        return acc

    def factor(self) -> Poly:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, _ = tok = self.take()
            if kind != 2:
                self.fail("expected an exponent", tok)
            base = poly_pow(base, int(val), self.one)
        return base

    def atom(self) -> Poly:
        kind, val, col = tok = self.take()
        if kind == 1:
            if val not in self.pos:
                self.fail(f"unknown generator {val!r}", tok)
            e = [0] * len(self.names)
            e[self.pos[val]] = 1
            return frozenset((tuple(e),))
        if kind == 2:
            return frozenset((self.one,)) if int(val) % 2 else frozenset()
        if val == "(":
            inner = self.expr()
            if self.peek()[1] != ")":
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail("expected a generator, constant or '('", tok)


def parse_poly(text: str, names: Sequence[str]) -> Poly:
    return _Parser(text, names).parse()


def poly_mul(a: Poly, b: Poly) -> Poly:
    out: set = set()
    for x in a:
        for y in b:
            out ^= {tuple(i + j for i, j in zip(x, y))}
    return frozenset(out)


def poly_pow(a: Poly, n: int, one: tuple[int, ...]) -> Poly:
    out = frozenset((one,))
    for _ in range(n):
        out = poly_mul(out, a)
    return out


def mono_degree(e: Sequence[int], degrees: Sequence[int]) -> int:
    return sum(x * d for x, d in zip(e, degrees))


def format_mono(e: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for x, nm in zip(e, names):
        if x == 1:
            parts.append(nm)
        elif x > 1:
            parts.append(f"{nm}^{x}")
    return "*".join(parts) if parts else "1"


def mono_key(e: Sequence[int]):
    # ascending order puts monomials heavy in later generators first
    return tuple(-x for x in reversed(e))


def format_poly(p: Poly, names: Sequence[str]) -> str:
    if not p:
        return "0"
    return " + ".join(format_mono(e, names) for e in sorted(p, key=mono_key, reverse=True))
