"""Eager simplification by local, equivalence-preserving rewrites.

Each ``mk_*`` function builds a node from already simplified operands and
applies the local rules for its operator. None of them ever returns a
formula larger than the plain node, and ``simplify`` (a bottom-up rebuild
through them) is idempotent.
"""

from __future__ import annotations

from typing import Dict, Optional

from .formula import (
    FALSE, TRUE, And, Const, Formula, LimitFG, LimitGF, Next, Or, Release,
    StrongRelease, Until, WeakUntil,
)

__all__ = ["simplify", "Simplifier", "SMART"]


def mk_and(a: Formula, b: Formula) -> Formula:
    if a is TRUE:
        return b
    if b is TRUE or a is b:
        return a
    if a is FALSE or b is FALSE:
        return FALSE
    return And(a, b)


def mk_or(a: Formula, b: Formula) -> Formula:
    if a is FALSE:
        return b
    if b is FALSE or a is b:
        return a
    if a is TRUE or b is TRUE:
        return TRUE
    return Or(a, b)


def mk_next(a: Formula) -> Formula:
    return a if isinstance(a, Const) else Next(a)


def mk_until(a: Formula, b: Formula) -> Formula:
    if isinstance(b, Const):  # a U true = true, a U false = false
        return b
    if a is FALSE:
        return b
    return Until(a, b)


def mk_weak_until(a: Formula, b: Formula) -> Formula:
    if b is TRUE or a is TRUE:
        return TRUE
    if a is FALSE:
        return b
    if b is FALSE:  # a W false = G a
        return Release(FALSE, a)
    return WeakUntil(a, b)


def mk_release(a: Formula, b: Formula) -> Formula:
    if isinstance(b, Const):  # a R true = true, a R false = false
        return b
    if a is TRUE:
        return b
    return Release(a, b)


def mk_strong_release(a: Formula, b: Formula) -> Formula:
    if b is FALSE or a is FALSE:
        return FALSE
    if a is TRUE:
        return b
    return StrongRelease(a, b)


def mk_gf(a: Formula) -> Formula:
    if isinstance(a, (Const, LimitGF, LimitFG)):
        return a
    return LimitGF(a)


def mk_fg(a: Formula) -> Formula:
    if isinstance(a, (Const, LimitGF, LimitFG)):
        return a
    return LimitFG(a)


SMART = {
    And: mk_and, Or: mk_or, Next: mk_next, Until: mk_until,
    WeakUntil: mk_weak_until, Release: mk_release,
    StrongRelease: mk_strong_release, LimitGF: mk_gf, LimitFG: mk_fg,
}


class Simplifier:
    """Memoizing simplifier; reuse one instance across related calls."""

    def __init__(self):
        self.memo: Dict[Formula, Formula] = {}

    def __call__(self, f: Formula) -> Formula:
        memo = self.memo
        hit: Optional[Formula] = memo.get(f)
        if hit is not None:
            return hit
        if not f.children:
            out = f
        else:
            out = SMART[type(f)](*(self(c) for c in f.children))
        memo[f] = out
        memo.setdefault(out, out)
        return out


def simplify(f: Formula) -> Formula:
    """Equivalent formula with constants, idempotent Boolean operands and
    nested limit operators folded away."""
    return Simplifier()(f)
