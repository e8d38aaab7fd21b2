"""The normalization rule catalog.

Every rule rewrites a formula with one context ``φ[▫]`` whose holes stand
for a distinguished subformula (the *target*): a U/M/W/R node or a limit
node. Right-hand sides are built literally, with no simplification.

Internally a rule receives a *plug*: a function that, given how to
transform each target occurrence, rebuilds the context. Plain contexts plug
the same formula into every hole; broad replacement transforms every node
that agrees with the target on its key argument.
"""

from __future__ import annotations

from enum import Enum
from typing import Callable, Dict, Mapping, Sequence, Tuple, Union

from .formula import (
    FALSE, TRUE, And, Context, Formula, LimitFG, LimitGF, Or, Release,
    StrongRelease, Until, WeakUntil, always,
)

__all__ = ["RuleId", "ShapeMismatch", "apply_rule", "lhs", "RULE_SLOTS", "TARGET_TYPE"]


class RuleId(Enum):
    WU = 1
    UW = 2
    GF1 = 3
    FG1 = 4
    GF2 = 5
    FG2 = 6
    MW = 7
    WM = 8
    UR = 9
    MR = 10
    RU = 11
    RM = 12
    GFR = 13
    FGM = 14

    def __str__(self) -> str:
        return self.name


class ShapeMismatch(ValueError):
    """The supplied context and parts do not fit the rule's left-hand side."""


# Operator of the subformula the context's holes stand for.
TARGET_TYPE: Dict[RuleId, type] = {
    RuleId.WU: Until, RuleId.UW: Until, RuleId.UR: Until, RuleId.RU: Until,
    RuleId.FG2: Until,
    RuleId.WM: StrongRelease, RuleId.MW: StrongRelease, RuleId.MR: StrongRelease,
    RuleId.RM: StrongRelease, RuleId.FGM: StrongRelease,
    RuleId.GF2: WeakUntil, RuleId.GFR: Release,
    RuleId.GF1: LimitGF, RuleId.FG1: LimitFG,
}

# Named formula slots besides the context.
RULE_SLOTS: Dict[RuleId, Tuple[str, ...]] = {
    RuleId.WU: ("phi1", "psi1", "psi2"), RuleId.WM: ("phi1", "psi1", "psi2"),
    RuleId.UW: ("phi2", "psi1", "psi2"), RuleId.MW: ("phi2", "psi1", "psi2"),
    RuleId.UR: ("phi2", "psi1", "psi2"), RuleId.MR: ("phi2", "psi1", "psi2"),
    RuleId.RU: ("phi1", "psi1", "psi2"), RuleId.RM: ("phi1", "psi1", "psi2"),
    RuleId.GF1: ("psi",), RuleId.FG1: ("psi",),
    RuleId.GF2: ("psi1", "psi2"), RuleId.GFR: ("psi1", "psi2"),
    RuleId.FG2: ("psi1", "psi2"), RuleId.FGM: ("psi1", "psi2"),
}

Transform = Callable[[Formula], Formula]
Plug = Callable[[Transform], Formula]

_FLIP = {Until: WeakUntil, WeakUntil: Until, StrongRelease: Release, Release: StrongRelease}


def same(n: Formula) -> Formula:
    return n


def flip(n: Formula) -> Formula:
    """Strong <-> weak counterpart with the same arguments."""
    return _FLIP[type(n)](n.left, n.right)


def to_true(n: Formula) -> Formula:
    return TRUE


def to_false(n: Formula) -> Formula:
    return FALSE


def build_rhs(rule: RuleId, plug: Plug, p: Mapping[str, Formula]) -> Formula:
    """Right-hand side of ``rule``; ``p`` holds the slot formulas."""
    R = RuleId
    if rule in (R.WU, R.WM):
        return Or(Until(p["phi1"], plug(same)), always(p["phi1"]))
    if rule in (R.UW, R.MW):
        key = p["psi2"] if rule is R.UW else p["psi1"]
        return Or(
            And(LimitGF(key), WeakUntil(plug(flip), p["phi2"])),
            Until(plug(same), Or(p["phi2"], always(plug(to_false)))),
        )
    if rule in (R.UR, R.MR):
        return Or(StrongRelease(plug(same), p["phi2"]), always(p["phi2"]))
    if rule in (R.RU, R.RM):
        key = p["psi2"] if rule is R.RU else p["psi1"]
        return Or(
            And(LimitGF(key), Release(p["phi1"], plug(flip))),
            StrongRelease(Or(p["phi1"], always(plug(to_false))), plug(same)),
        )
    if rule in (R.GF1, R.FG1):
        limit = LimitGF if rule is R.GF1 else LimitFG
        return Or(And(limit(p["psi"]), plug(to_true)), plug(to_false))
    if rule in (R.GF2, R.GFR):
        key = p["psi1"] if rule is R.GF2 else p["psi2"]
        return Or(LimitGF(plug(flip)), And(LimitFG(key), LimitGF(plug(to_true))))
    if rule in (R.FG2, R.FGM):
        key = p["psi2"] if rule is R.FG2 else p["psi1"]
        return Or(And(LimitGF(key), LimitFG(plug(flip))), LimitFG(plug(to_false)))
    raise ShapeMismatch(f"unknown rule {rule!r}")


def build_lhs(rule: RuleId, plug: Plug, p: Mapping[str, Formula]) -> Formula:
    R = RuleId
    if rule in (R.WU, R.WM):
        return WeakUntil(p["phi1"], plug(same))
    if rule in (R.UW, R.MW):
        return WeakUntil(plug(same), p["phi2"])
    if rule in (R.UR, R.MR):
        return Release(plug(same), p["phi2"])
    if rule in (R.RU, R.RM):
        return Release(p["phi1"], plug(same))
    if rule in (R.GF1, R.FG1):
        return plug(same)
    if rule in (R.GF2, R.GFR):
        return LimitGF(plug(same))
    if rule in (R.FG2, R.FGM):
        return LimitFG(plug(same))
    raise ShapeMismatch(f"unknown rule {rule!r}")


def target_of(rule: RuleId, p: Mapping[str, Formula]) -> Formula:
    kind = TARGET_TYPE[rule]
    if kind in (LimitGF, LimitFG):
        return kind(p["psi"])
    return kind(p["psi1"], p["psi2"])


def _prepare(rule, ctxs, parts) -> Tuple[Context, Dict[str, Formula]]:
    if not isinstance(rule, RuleId):
        raise ShapeMismatch(f"not a rule: {rule!r}")
    if isinstance(ctxs, Context):
        ctx = ctxs
    elif isinstance(ctxs, Sequence) and len(ctxs) == 1 and isinstance(ctxs[0], Context):
        ctx = ctxs[0]
    else:
        raise ShapeMismatch(f"rule {rule} takes exactly one context")
    slots = RULE_SLOTS[rule]
    given = dict(parts)
    if set(given) != set(slots):
        raise ShapeMismatch(
            f"rule {rule} needs slots {', '.join(slots)}; got {', '.join(sorted(given)) or 'none'}"
        )
    for name, value in given.items():
        if not isinstance(value, Formula):
            raise ShapeMismatch(f"slot {name} must be a Formula")
    return ctx, given


def _ctx_plug(ctx: Context, target: Formula) -> Plug:
    return lambda transform: ctx(transform(target))


def apply_rule(
    rule: RuleId,
    ctxs: Union[Context, Sequence[Context]],
    parts: Mapping[str, Formula],
) -> Formula:
    """Literal right-hand side of ``rule``.

    ``ctxs`` is the rule's context (the formula written with ``[...]``) and
    ``parts`` maps the remaining slot names (see ``RULE_SLOTS``) to formulas.
    For GF1/FG1 the slot ``psi`` is the argument of the limit operator.
    """
    ctx, p = _prepare(rule, ctxs, parts)
    return build_rhs(rule, _ctx_plug(ctx, target_of(rule, p)), p)


def lhs(
    rule: RuleId,
    ctxs: Union[Context, Sequence[Context]],
    parts: Mapping[str, Formula],
) -> Formula:
    """Left-hand side of ``rule`` for the same arguments as :func:`apply_rule`."""
    ctx, p = _prepare(rule, ctxs, parts)
    return build_lhs(rule, _ctx_plug(ctx, target_of(rule, p)), p)
