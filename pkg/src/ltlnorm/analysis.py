"""Size measures, hierarchy classification and normal-form predicates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

from .formula import (
    BOOLEAN, LIMIT, TEMPORAL, U_LIKE, W_LIKE, And, Atom, Const, Formula,
    LimitFG, LimitGF, NegAtom, Next, Or, iter_nodes,
)

__all__ = [
    "Measures", "measures", "ubw", "gfba", "dag_size", "rank",
    "HierarchyClass", "classify", "Verdict", "is_normal_form",
    "is_dual_normal_form", "is_stage_form", "boolean_components",
    "is_delta2_combination", "limit_obstacles", "belongs_to",
]


@dataclass(frozen=True)
class Measures:
    nodes: int
    dag_nodes: int
    ubw: int
    gfba: int


def dag_size(f: Formula) -> int:
    return sum(1 for _ in iter_nodes(f))


def ubw(f: Formula) -> int:
    """Occurrences of U/M nodes under some W/R node but under no limit node."""
    # counts[node] = (all U-like occurrences outside limits,
    #                 U-like occurrences under a W-like node, outside limits)
    memo: Dict[Formula, Tuple[int, int]] = {}

    def go(node: Formula) -> Tuple[int, int]:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, LIMIT) or not node.children:
            out = (0, 0)
        else:
            total = under = 0
            for c in node.children:
                t, u = go(c)
                total += t
                under += u
            if isinstance(node, W_LIKE):
                under = total
            if isinstance(node, U_LIKE):
                total += 1
            out = (total, under)
        memo[node] = out
        return out

    return go(f)[1]


def limits_under_temporal(f: Formula) -> List[Formula]:
    """Distinct limit formulas that are proper subformulas of a temporal
    subformula, in preorder of first occurrence."""
    found: Dict[Formula, None] = {}
    seen = set()
    stack = [(f, False)]
    while stack:
        node, under = stack.pop()
        if (node, under) in seen:
            continue
        seen.add((node, under))
        if under and isinstance(node, LIMIT):
            found.setdefault(node)
        below = under or isinstance(node, TEMPORAL)
        stack.extend((c, below) for c in reversed(node.children))
    return list(found)


def gfba(f: Formula) -> int:
    return len(limits_under_temporal(f))


def measures(f: Formula) -> Measures:
    return Measures(nodes=f.size, dag_nodes=dag_size(f), ubw=ubw(f), gfba=gfba(f))


def rank(f: Formula) -> int:
    """Stage-1 termination measure: tree size plus U-under-W count."""
    return f.size + ubw(f)


# -- hierarchy ---------------------------------------------------------------

_ORDER = {"Sigma": 0, "Pi": 0, "Delta": 1}


@dataclass(frozen=True)
class HierarchyClass:
    kind: str  # "Sigma" | "Pi" | "Delta"
    level: int

    def __post_init__(self):
        if self.kind not in _ORDER or self.level < 0:
            raise ValueError(f"bad class {self.kind} {self.level}")

    def __str__(self) -> str:
        return f"{self.kind} {self.level}"

    def __le__(self, other: "HierarchyClass") -> bool:
        """Class inclusion."""
        a, b = self, other
        if a.level == 0:
            return True
        if a.level < b.level:
            return True
        if a.level > b.level:
            return False
        return a.kind == b.kind or b.kind == "Delta"

    def __lt__(self, other: "HierarchyClass") -> bool:
        return self <= other and self != other


def _levels(f: Formula) -> Tuple[int, int, int]:
    """Least (Sigma, Pi, Delta) levels containing ``f``."""
    memo: Dict[Formula, Tuple[int, int, int]] = {}

    def sigma_op(s: int, p: int) -> Tuple[int, int]:
        s = max(1, s)
        return s, s + 1

    def pi_op(s: int, p: int) -> Tuple[int, int]:
        p = max(1, p)
        return p + 1, p

    def go(node: Formula) -> Tuple[int, int, int]:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if isinstance(node, (Const, Atom, NegAtom)):
            out = (0, 0, 0)
        elif isinstance(node, BOOLEAN):
            (s1, p1, d1), (s2, p2, d2) = go(node.left), go(node.right)
            s, p = max(s1, s2), max(p1, p2)
            s, p = min(s, p + 1), min(p, s + 1)
            out = (s, p, min(s, p, max(d1, d2)))
        elif isinstance(node, Next):
            s, p, _ = go(node.arg)
            s, p = max(1, s), max(1, p)
            s, p = min(s, p + 1), min(p, s + 1)
            out = (s, p, min(s, p))
        elif isinstance(node, (LimitGF, LimitFG)):
            s, p, _ = go(node.arg)
            if isinstance(node, LimitGF):  # G (F arg)
                s, p = pi_op(*sigma_op(s, p))
            else:  # F (G arg)
                s, p = sigma_op(*pi_op(s, p))
            out = (s, p, min(s, p))
        else:
            (s1, p1, _), (s2, p2, _) = go(node.left), go(node.right)
            if isinstance(node, U_LIKE):
                s, p = sigma_op(max(s1, s2), max(p1, p2))
            else:
                s, p = pi_op(max(s1, s2), max(p1, p2))
            out = (s, p, min(s, p))
        memo[node] = out
        return out

    return go(f)


def classify(f: Formula) -> HierarchyClass:
    """Least class of the syntactic future hierarchy containing ``f``.

    Limit nodes count as ``G F`` / ``F G``. A formula in both Sigma_k and
    Pi_k (e.g. ``X a``) is reported as Delta_k, like level 0.
    """
    s, p, d = _levels(f)
    if s < p and s <= d:
        return HierarchyClass("Sigma", s)
    if p < s and p <= d:
        return HierarchyClass("Pi", p)
    return HierarchyClass("Delta", min(s, p, d))


# -- normal forms --------------------------------------------------------------


@dataclass(frozen=True)
class Verdict:
    """Result of a normal-form check; ``condition`` is 0 on success."""

    condition: int = 0
    path: str = ""
    node: Optional[Formula] = None

    def __bool__(self) -> bool:
        return self.condition == 0

    def __str__(self) -> str:
        if self.condition == 0:
            return "normal form"
        where = self.path or "<root>"
        return f"condition {self.condition} violated at {where}: {self.node}"


_CHILD_NAMES = {1: (".arg",), 2: (".left", ".right")}


def _walk_with_ancestors(f: Formula) -> Iterator[Tuple[Formula, str, frozenset]]:
    """Preorder over tree positions with the set of ancestor operator kinds.

    Positions are deduplicated on (node, ancestor kinds) so shared
    subterms are visited once per distinct context.
    """
    seen = set()
    stack = [(f, "", frozenset())]
    while stack:
        node, path, above = stack.pop()
        if (node, above) in seen:
            continue
        seen.add((node, above))
        yield node, path, above
        kids = node.children
        if not kids:
            continue
        here = above | {_kind(node)}
        names = _CHILD_NAMES[len(kids)]
        for child, name in reversed(list(zip(kids, names))):
            stack.append((child, path + name, here))


def _kind(node: Formula) -> str:
    if isinstance(node, U_LIKE):
        return "U"
    if isinstance(node, W_LIKE):
        return "W"
    if isinstance(node, LimitGF):
        return "GF"
    if isinstance(node, LimitFG):
        return "FG"
    if isinstance(node, Next):
        return "X"
    return "B"


def _check(f: Formula, dual: bool) -> Verdict:
    for node, path, above in _walk_with_ancestors(f):
        kind = _kind(node)
        if not dual and kind == "U" and "W" in above:
            return Verdict(1, path, node)
        if dual and kind == "W" and "U" in above:
            return Verdict(1, path, node)
        if kind in ("GF", "FG") and above - {"B"}:
            return Verdict(2, path, node)
        if (kind == "W" and "GF" in above) or (kind == "U" and "FG" in above):
            return Verdict(3, path, node)
    return Verdict()


def is_normal_form(f: Formula) -> Verdict:
    """Check the three normal-form conditions (M counts as U, R as W)."""
    return _check(f, dual=False)


def is_dual_normal_form(f: Formula) -> Verdict:
    """Like :func:`is_normal_form` with condition 1 read as "no W under U"."""
    return _check(f, dual=True)


def is_stage_form(f: Formula, stage: int) -> bool:
    if stage == 1:
        return ubw(f) == 0
    if stage == 2:
        return ubw(f) == 0 and gfba(f) == 0
    raise ValueError("stage must be 1 or 2")


def boolean_components(f: Formula) -> Iterator[Formula]:
    """Maximal subformulas whose top operator is not a Boolean connective."""
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, (And, Or)):
            stack.extend((node.right, node.left))
        else:
            yield node


def belongs_to(f: Formula, cls: HierarchyClass) -> bool:
    """Whether ``f`` is a member of ``cls`` (not necessarily its least class)."""
    s, p, d = _levels(f)
    level = {"Sigma": s, "Pi": p, "Delta": d}[cls.kind]
    return level <= cls.level


def is_delta2_combination(f: Formula, dual: bool = False) -> bool:
    """Positive Boolean combination of Sigma_2 formulas and GF(Sigma_1)
    formulas (dually: Pi_2 and FG(Pi_1))."""
    kind, limit_kind = ("Pi", LimitFG) if dual else ("Sigma", LimitGF)
    for comp in boolean_components(f):
        if belongs_to(comp, HierarchyClass(kind, 2)):
            continue
        if isinstance(comp, limit_kind) and belongs_to(comp.arg, HierarchyClass(kind, 1)):
            continue
        return False
    return True


def limit_obstacles(f: Formula) -> int:
    """Obstacles inside limit nodes: in a GF, W-nodes and U-nodes under a
    W-node; in an FG, U-nodes and W-nodes under a U-node (tree occurrences)."""
    memo: Dict[Tuple[Formula, frozenset], int] = {}

    def go(node: Formula, above: frozenset) -> int:
        key = (node, above)
        hit = memo.get(key)
        if hit is not None:
            return hit
        kind = _kind(node)
        here = 0
        if "GF" in above and (kind == "W" or (kind == "U" and "W" in above)):
            here = 1
        elif "FG" in above and (kind == "U" or (kind == "W" and "U" in above)):
            here = 1
        below = above | {kind}
        out = here + sum(go(c, below) for c in node.children)
        memo[key] = out
        return out

    return go(f, frozenset())
