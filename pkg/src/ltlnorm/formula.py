"""Extended LTL syntax trees in negation normal form.

Formulas are hash-consed: building the same tree twice yields the same
object, so structural equality coincides with identity and every pass can
memoize over the DAG of distinct subformulas instead of the (possibly
exponentially larger) syntax tree.
"""

from __future__ import annotations

import threading
import weakref
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Tuple

__all__ = [
    "Formula", "Const", "Atom", "NegAtom", "And", "Or", "Next", "Until",
    "WeakUntil", "Release", "StrongRelease", "LimitGF", "LimitFG",
    "TRUE", "FALSE", "HOLE", "HOLE_NAME", "Context", "TargetNotFound",
    "eventually", "always", "conj", "disj", "negate_nnf", "subformulas",
    "atoms", "fill", "abstract_occurrences", "replace", "iter_nodes",
    "U_LIKE", "W_LIKE", "LIMIT", "TEMPORAL", "BOOLEAN",
]

_table: "weakref.WeakValueDictionary[tuple, Formula]" = weakref.WeakValueDictionary()
_lock = threading.Lock()


def _intern(key: tuple, build: Callable[[], "Formula"]) -> "Formula":
    node = _table.get(key)
    if node is None:
        with _lock:
            node = _table.get(key)
            if node is None:
                node = build()
                _table[key] = node
    return node


class Formula:
    """Base class of all formula nodes. Instances are immutable and interned."""

    __slots__ = ("size", "__weakref__")
    children: Tuple["Formula", ...] = ()

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __copy__(self):
        return self

    def __deepcopy__(self, memo):
        return self

    def __str__(self) -> str:
        from .syntax import render

        return render(self)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self}>"

    def rebuild(self, children: Tuple["Formula", ...]) -> "Formula":
        """Same operator over new children (leaves return themselves)."""
        return self

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)


def _set(node, **fields):
    for k, v in fields.items():
        object.__setattr__(node, k, v)
    return node


class Const(Formula):
    __slots__ = ("value",)
    __match_args__ = ("value",)

    def __new__(cls, value: bool):
        value = bool(value)
        return _intern((cls, value), lambda: _set(object.__new__(cls), value=value, size=1))

    def __reduce__(self):
        return (Const, (self.value,))


class Atom(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        return _intern((cls, name), lambda: _set(object.__new__(cls), name=name, size=1))

    def __reduce__(self):
        return (type(self), (self.name,))


class NegAtom(Formula):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __new__(cls, name: str):
        return _intern((cls, name), lambda: _set(object.__new__(cls), name=name, size=1))

    def __reduce__(self):
        return (type(self), (self.name,))


class Unary(Formula):
    __slots__ = ("arg",)
    __match_args__ = ("arg",)

    def __new__(cls, arg: Formula):
        if not isinstance(arg, Formula):
            raise TypeError(f"expected Formula, got {type(arg).__name__}")
        return _intern(
            (cls, arg), lambda: _set(object.__new__(cls), arg=arg, size=arg.size + 1)
        )

    @property
    def children(self):
        return (self.arg,)

    def rebuild(self, children):
        (arg,) = children
        return self if arg is self.arg else type(self)(arg)

    def __reduce__(self):
        return (type(self), (self.arg,))


class Binary(Formula):
    __slots__ = ("left", "right")
    __match_args__ = ("left", "right")

    def __new__(cls, left: Formula, right: Formula):
        if not (isinstance(left, Formula) and isinstance(right, Formula)):
            raise TypeError("operands must be Formula instances")
        return _intern(
            (cls, left, right),
            lambda: _set(
                object.__new__(cls), left=left, right=right,
                size=left.size + right.size + 1,
            ),
        )

    @property
    def children(self):
        return (self.left, self.right)

    def rebuild(self, children):
        left, right = children
        if left is self.left and right is self.right:
            return self
        return type(self)(left, right)

    def __reduce__(self):
        return (type(self), (self.left, self.right))


class And(Binary):
    __slots__ = ()


class Or(Binary):
    __slots__ = ()


class Next(Unary):
    __slots__ = ()


class Until(Binary):
    __slots__ = ()


class WeakUntil(Binary):
    __slots__ = ()


class Release(Binary):
    """Weak release ``left R right``."""

    __slots__ = ()


class StrongRelease(Binary):
    """Strong release ``left M right``."""

    __slots__ = ()


class LimitGF(Unary):
    """Infinitely often; a single node."""

    __slots__ = ()


class LimitFG(Unary):
    """Almost always; a single node."""

    __slots__ = ()


TRUE = Const(True)
FALSE = Const(False)

# The placeholder is an atom whose name cannot be produced by the parser.
HOLE_NAME = "▫"
HOLE = Atom(HOLE_NAME)

U_LIKE = (Until, StrongRelease)
W_LIKE = (WeakUntil, Release)
LIMIT = (LimitGF, LimitFG)
TEMPORAL = (Next, Until, WeakUntil, Release, StrongRelease, LimitGF, LimitFG)
BOOLEAN = (And, Or)

# strong <-> weak counterpart with the same arguments
WEAKEN = {Until: WeakUntil, StrongRelease: Release}
STRENGTHEN = {WeakUntil: Until, Release: StrongRelease}


def eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def always(f: Formula) -> Formula:
    return Release(FALSE, f)


def conj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Distinct subformulas of ``f`` in preorder (first occurrence wins)."""
    seen = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if node in seen:
            continue
        seen.add(node)
        yield node
        stack.extend(reversed(node.children))


def subformulas(f: Formula) -> Dict[Formula, None]:
    """Insertion-ordered set of all distinct subformulas, preorder."""
    return dict.fromkeys(iter_nodes(f))


def atoms(f: Formula) -> Tuple[str, ...]:
    names = {n.name for n in iter_nodes(f) if isinstance(n, (Atom, NegAtom))}
    return tuple(sorted(names))


_DUAL = {
    And: Or, Or: And, Until: Release, Release: Until,
    WeakUntil: StrongRelease, StrongRelease: WeakUntil,
    LimitGF: LimitFG, LimitFG: LimitGF, Next: Next,
}


def negate_nnf(f: Formula) -> Formula:
    """NNF formula equivalent to the negation of ``f``."""
    memo: Dict[Formula, Formula] = {}

    def go(node: Formula) -> Formula:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, Const):
            out = Const(not node.value)
        elif isinstance(node, Atom):
            if node.name == HOLE_NAME:
                raise ValueError("cannot negate a placeholder")
            out = NegAtom(node.name)
        elif isinstance(node, NegAtom):
            out = Atom(node.name)
        else:
            out = _DUAL[type(node)](*(go(c) for c in node.children))
        memo[node] = out
        return out

    return go(f)


def replace(
    f: Formula,
    match: Callable[[Formula], Optional[Formula]],
    *,
    skip_limits: bool = False,
) -> Formula:
    """Top-down rewrite: wherever ``match(node)`` returns a formula, use it
    and do not descend further. Limit nodes are left untouched when
    ``skip_limits`` is set."""
    memo: Dict[Formula, Formula] = {}

    def go(node: Formula) -> Formula:
        hit = memo.get(node)
        if hit is not None:
            return hit
        repl = match(node)
        if repl is not None:
            out = repl
        elif not node.children or (skip_limits and isinstance(node, LIMIT)):
            out = node
        else:
            out = node.rebuild(tuple(go(c) for c in node.children))
        memo[node] = out
        return out

    return go(f)


def count_occurrences(f: Formula, target: Formula, *, skip_limits: bool = False) -> int:
    memo: Dict[Formula, int] = {}

    def go(node):
        if node is target:
            return 1
        if skip_limits and isinstance(node, LIMIT):
            return 0
        hit = memo.get(node)
        if hit is None:
            hit = memo[node] = sum(go(c) for c in node.children)
        return hit

    return go(f)


class TargetNotFound(LookupError):
    pass


@dataclass(frozen=True)
class Context:
    """A formula with one or more positive occurrences of the placeholder."""

    body: Formula
    hole_count: int

    def __post_init__(self):
        if self.hole_count < 1:
            raise ValueError("a context needs at least one hole")
        if NegAtom(HOLE_NAME) in subformulas(self.body):
            raise ValueError("placeholder must occur positively")

    @classmethod
    def of(cls, body: Formula) -> "Context":
        return cls(body, count_occurrences(body, HOLE))

    def __call__(self, g: Formula) -> Formula:
        return fill(self, g)

    def __str__(self) -> str:
        return str(self.body)


def fill(ctx: Context, g: Formula) -> Formula:
    """Substitute ``g`` for every placeholder of ``ctx``."""
    return replace(ctx.body, lambda n: g if n is HOLE else None)


def abstract_occurrences(
    f: Formula, target: Formula, scope: str = "all"
) -> Context:
    """Replace occurrences of ``target`` in ``f`` by the placeholder.

    ``scope`` is ``"all"`` or ``"not-under-limit"``; with the latter,
    occurrences inside GF/FG nodes are kept.
    """
    if scope not in ("all", "not-under-limit"):
        raise ValueError(f"unknown scope {scope!r}")
    skip = scope == "not-under-limit"
    body = replace(f, lambda n: HOLE if n is target else None, skip_limits=skip)
    holes = count_occurrences(body, HOLE)
    if holes == 0:
        raise TargetNotFound(f"{target} does not occur in {f}")
    return Context(body, holes)
