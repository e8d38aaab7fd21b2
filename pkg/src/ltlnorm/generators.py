"""Benchmark families and a seeded random formula generator."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple

from .formula import (
    And, Atom, Formula, LimitFG, LimitGF, NegAtom, Next, Or, Release,
    StrongRelease, Until, WeakUntil,
)

__all__ = [
    "family_wu_star", "family_wu_nested", "GeneratorSpec", "random_formula",
    "random_corpus", "generate", "DEFAULT_WEIGHTS",
]


def _a(i: int) -> Atom:
    return Atom(f"a{i}")


def family_wu_star(n: int) -> Formula:
    """``(...(((a0 U a1) W a2) U a3) ... U an)``: one W at the second level."""
    if n < 2:
        raise ValueError("wu-star needs n >= 2")
    f = WeakUntil(Until(_a(0), _a(1)), _a(2))
    for i in range(3, n + 1):
        f = Until(f, _a(i))
    return f


def family_wu_nested(n: int) -> Formula:
    """``phi_0 = a0`` and ``phi_{k+1} = (phi_k U a_{2k+1}) W a_{2k+2}``."""
    if n < 0:
        raise ValueError("wu-nested needs n >= 0")
    f: Formula = _a(0)
    for k in range(n):
        f = WeakUntil(Until(f, _a(2 * k + 1)), _a(2 * k + 2))
    return f


_BINARY = {"&": And, "|": Or, "U": Until, "W": WeakUntil, "R": Release, "M": StrongRelease}
_UNARY = {"X": Next, "GF": LimitGF, "FG": LimitFG}
_LEAVES = ("ap", "nap")

DEFAULT_WEIGHTS: Tuple[Tuple[str, float], ...] = (
    ("&", 1.0), ("|", 1.0), ("X", 1.0), ("U", 1.0), ("W", 1.0), ("R", 1.0), ("M", 1.0),
    ("GF", 0.0), ("FG", 0.0), ("ap", 1.0), ("nap", 1.0),
)


@dataclass(frozen=True)
class GeneratorSpec:
    """What to generate: ``kind`` is ``"wu-star"``, ``"wu-nested"`` or ``"random"``.

    Families use ``n``; random formulas use the remaining fields. ``weights``
    covers operators (``& | X U W R M GF FG``) and leaf kinds (``ap`` for an
    atom, ``nap`` for a negated atom).
    """

    kind: str
    n: int = 0
    seed: int = 0
    target_size: int = 25
    atom_count: int = 4
    weights: Tuple[Tuple[str, float], ...] = field(default=DEFAULT_WEIGHTS)

    def __post_init__(self):
        if isinstance(self.weights, Mapping):
            object.__setattr__(self, "weights", tuple(self.weights.items()))
        if self.kind == "wu-star":
            if self.n < 2:
                raise ValueError("wu-star needs n >= 2")
        elif self.kind == "wu-nested":
            if self.n < 0:
                raise ValueError("wu-nested needs n >= 0")
        elif self.kind == "random":
            if self.target_size < 1 or self.atom_count < 1:
                raise ValueError("random formulas need target_size >= 1 and atom_count >= 1")
            w = self.weight_map()
            unknown = set(w) - set(_BINARY) - set(_UNARY) - set(_LEAVES)
            if unknown:
                raise ValueError(f"unknown weight keys: {', '.join(sorted(unknown))}")
            if any(v < 0 for v in w.values()):
                raise ValueError("weights must be nonnegative")
            if not any(w.get(k, 0) > 0 for k in _LEAVES):
                raise ValueError("at least one leaf kind needs positive weight")
        else:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    def weight_map(self) -> Dict[str, float]:
        return dict(self.weights)


def random_formula(spec: GeneratorSpec) -> Formula:
    """A random NNF formula with exactly ``target_size`` nodes when the
    weights allow it. The node budget is split top-down; leaves appear when
    the budget runs out."""
    if spec.kind != "random":
        raise ValueError("random_formula needs a random spec")
    rng = random.Random(spec.seed)
    w = spec.weight_map()
    binary = [(k, w.get(k, 0.0)) for k in _BINARY if w.get(k, 0.0) > 0]
    unary = [(k, w.get(k, 0.0)) for k in _UNARY if w.get(k, 0.0) > 0]
    leaves = [(k, w.get(k, 0.0)) for k in _LEAVES if w.get(k, 0.0) > 0]

    def pick(options):
        names, weights = zip(*options)
        return rng.choices(names, weights)[0]

    def leaf() -> Formula:
        name = f"a{rng.randrange(spec.atom_count)}"
        return Atom(name) if pick(leaves) == "ap" else NegAtom(name)

    def go(budget: int) -> Formula:
        options = list(unary) if budget >= 2 else []
        if budget >= 3:
            options += binary
        if not options:
            return leaf()
        op = pick(options)
        if op in _UNARY:
            return _UNARY[op](go(budget - 1))
        left = rng.randint(1, budget - 2)
        return _BINARY[op](go(left), go(budget - 1 - left))

    return go(spec.target_size)


def random_corpus(seed: int, target_size: int, atom_count: int, count: int,
                  weights=DEFAULT_WEIGHTS) -> List[Formula]:
    """``count`` random formulas; formula ``i`` uses seed ``seed * 1_000_000 + i``."""
    return [
        random_formula(GeneratorSpec("random", seed=seed * 1_000_000 + i,
                                     target_size=target_size, atom_count=atom_count,
                                     weights=weights))
        for i in range(count)
    ]


def generate(spec: GeneratorSpec) -> Formula:
    if spec.kind == "wu-star":
        return family_wu_star(spec.n)
    if spec.kind == "wu-nested":
        return family_wu_nested(spec.n)
    return random_formula(spec)
