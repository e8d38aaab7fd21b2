"""Text syntax: parsing into extended NNF formulas and rendering back.

Grammar (whitespace-insensitive)::

    formula  := disj
    disj     := conj { "|" conj }
    conj     := binop { "&" binop }
    binop    := unary { ("U"|"W"|"R"|"M") unary }      right-associative
    unary    := ("!"|"X"|"F"|"G") unary | atompart
    atompart := "1" | "0" | "true" | "false" | identifier | "(" formula ")"

Negations are pushed to the atoms while parsing, ``F``/``G`` become
``true U _`` / ``false R _``, and an adjacent ``G F`` (``F G``) pair becomes a
single limit node. Pairs fuse innermost first, so ``F G F a`` reads as
``F (G F a)``.
"""

from __future__ import annotations

import re
from typing import List, Optional, Tuple

from .formula import (
    FALSE, HOLE_NAME, TRUE, And, Atom, Const, Formula, LimitFG, LimitGF,
    NegAtom, Next, Or, Release, StrongRelease, Until, WeakUntil,
)

__all__ = ["ParseError", "parse", "render"]


class ParseError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.text = text
        self.position = position

    def caret(self) -> str:
        """The offending line with a caret under the error position."""
        return f"{self.text}\n{' ' * self.position}^"


_TOKEN = re.compile(
    r"\s*(?:(?P<ident>[a-z][A-Za-z0-9_]*)|(?P<op>[()!&|UWRMXFG01])|(?P<bad>\S))"
)
_BINOPS = {"U": "U", "W": "W", "R": "R", "M": "M"}


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        start = m.start(m.lastgroup)
        if m.lastgroup == "bad":
            ch = m.group("bad")
            if ch == HOLE_NAME:
                raise ParseError("placeholder symbol is reserved", text, start)
            raise ParseError(f"unknown token {ch!r}", text, start)
        tokens.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, tok, what: str):
        kind, value, pos = tok
        found = "end of input" if kind == "end" else repr(value)
        raise ParseError(f"expected {what}, found {found}", self.text, pos)

    def formula(self):
        node = self.conj()
        while self.peek()[1] == "|" and self.peek()[0] == "op":
            self.take()
            node = ("|", node, self.conj())
        return node

    def conj(self):
        node = self.binop()
        while self.peek()[1] == "&" and self.peek()[0] == "op":
            self.take()
            node = ("&", node, self.binop())
        return node

    def binop(self):
        left = self.unary()
        kind, value, _ = self.peek()
        if kind == "op" and value in _BINOPS:
            self.take()
            return (value, left, self.binop())
        return left

    def unary(self):
        kind, value, _ = tok = self.take()
        if kind == "op" and value in "!XFG":
            return ("!" if value == "!" else value, self.unary())
        if kind == "op" and value in "01":
            return ("const", value == "1")
        if kind == "ident":
            if value in ("true", "false"):
                return ("const", value == "true")
            return ("ap", value)
        if kind == "op" and value == "(":
            node = self.formula()
            if self.peek()[1] != ")":
                self.fail(self.peek(), "')'")
            self.take()
            return node
        self.fail(tok, "a formula")


_NEG_BINARY = {"&": "|", "|": "&", "U": "R", "R": "U", "W": "M", "M": "W"}


def _push(raw, neg: bool):
    """Push negations down to atoms; keeps F/G as raw sugar nodes."""
    tag = raw[0]
    if tag == "const":
        return ("const", raw[1] != neg)
    if tag == "ap":
        return ("nap", raw[1]) if neg else raw
    if tag == "!":
        return _push(raw[1], not neg)
    if tag == "X":
        return ("X", _push(raw[1], neg))
    if tag in ("F", "G"):
        flipped = {"F": "G", "G": "F"}[tag] if neg else tag
        return (flipped, _push(raw[1], neg))
    op = _NEG_BINARY[tag] if neg else tag
    return (op, _push(raw[1], neg), _push(raw[2], neg))


_BUILD = {"&": And, "|": Or, "U": Until, "W": WeakUntil, "R": Release, "M": StrongRelease}


def _lower(raw) -> Formula:
    tag = raw[0]
    if tag == "const":
        return TRUE if raw[1] else FALSE
    if tag == "ap":
        return Atom(raw[1])
    if tag == "nap":
        return NegAtom(raw[1])
    if tag == "X":
        return Next(_lower(raw[1]))
    if tag == "F":
        inner = _lower(raw[1])
        if raw[1][0] == "G" and isinstance(inner, Release) and inner.left is FALSE:
            return LimitFG(inner.right)
        return Until(TRUE, inner)
    if tag == "G":
        inner = _lower(raw[1])
        if raw[1][0] == "F" and isinstance(inner, Until) and inner.left is TRUE:
            return LimitGF(inner.right)
        return Release(FALSE, inner)
    return _BUILD[tag](_lower(raw[1]), _lower(raw[2]))


def parse(text: str) -> Formula:
    """Parse ``text`` into an extended NNF formula."""
    p = _Parser(text)
    raw = p.formula()
    if p.peek()[0] != "end":
        p.fail(p.peek(), "end of input")
    return _lower(_push(raw, False))


# -- rendering -------------------------------------------------------------

_SYMBOL = {And: "&", Or: "|", Until: "U", WeakUntil: "W", Release: "R", StrongRelease: "M"}
_PREC_OR, _PREC_AND, _PREC_BIN, _PREC_UNARY, _PREC_ATOM = 1, 2, 3, 4, 5


def _is_f_sugar(f: Formula) -> bool:
    return isinstance(f, Until) and f.left is TRUE


def _is_g_sugar(f: Formula) -> bool:
    return isinstance(f, Release) and f.left is FALSE


def render(f: Formula) -> str:
    """Render ``f`` so that ``parse(render(f)) == f``."""
    memo = {}

    def wrap(sub: Formula, need: int, forbid: Optional[str] = None) -> str:
        text, prec = go(sub, forbid)
        return f"({text})" if prec < need else text

    def go(node: Formula, forbid: Optional[str] = None) -> Tuple[str, int]:
        key = (node, forbid)
        hit = memo.get(key)
        if hit is not None:
            return hit
        # ``forbid`` names a sugar letter that must not start this subterm,
        # because it would fuse with the operator printed just above it.
        if isinstance(node, Const):
            out = ("true" if node.value else "false", _PREC_ATOM)
        elif isinstance(node, Atom):
            out = (node.name, _PREC_ATOM)
        elif isinstance(node, NegAtom):
            out = ("!" + node.name, _PREC_UNARY)
        elif isinstance(node, Next):
            out = ("X " + wrap(node.arg, _PREC_UNARY), _PREC_UNARY)
        elif isinstance(node, LimitGF):
            out = ("G F " + wrap(node.arg, _PREC_UNARY, "G"), _PREC_UNARY)
        elif isinstance(node, LimitFG):
            out = ("F G " + wrap(node.arg, _PREC_UNARY, "F"), _PREC_UNARY)
        elif _is_f_sugar(node) and forbid != "F":
            out = ("F " + wrap(node.right, _PREC_UNARY, "G"), _PREC_UNARY)
        elif _is_g_sugar(node) and forbid != "G":
            out = ("G " + wrap(node.right, _PREC_UNARY, "F"), _PREC_UNARY)
        elif isinstance(node, And):
            out = (f"{wrap(node.left, _PREC_AND)} & {wrap(node.right, _PREC_AND + 1)}", _PREC_AND)
        elif isinstance(node, Or):
            out = (f"{wrap(node.left, _PREC_OR)} | {wrap(node.right, _PREC_OR + 1)}", _PREC_OR)
        else:
            sym = _SYMBOL[type(node)]
            left = wrap(node.left, _PREC_BIN + 1)
            right = wrap(node.right, _PREC_BIN + 1)
            out = (f"{left} {sym} {right}", _PREC_BIN)
        memo[key] = out
        return out

    return go(f)[0]
