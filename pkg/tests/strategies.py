"""Formula strategies for hypothesis and seeded builders for bulk checks."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from ltlnorm.formula import (
    FALSE, HOLE, TRUE, And, Atom, Formula, LimitFG, LimitGF, NegAtom, Next,
    Or, Release, StrongRelease, Until, WeakUntil,
)
from ltlnorm.generators import GeneratorSpec, random_formula

BINARY = (And, Or, Until, WeakUntil, Release, StrongRelease)
UNARY = (Next, LimitGF, LimitFG)


def leaves(atoms=("a", "b"), constants=True):
    pool = [Atom(a) for a in atoms] + [NegAtom(a) for a in atoms]
    if constants:
        pool += [TRUE, FALSE]
    return st.sampled_from(pool)


def formulas(atoms=("a", "b"), max_leaves=6, limits=True, constants=True, nexts=True):
    unary = tuple(u for u in UNARY if (limits or u is Next) and (nexts or u is not Next))

    def extend(children):
        binary = st.tuples(st.sampled_from(BINARY), children, children).map(lambda t: t[0](t[1], t[2]))
        if not unary:
            return binary
        return st.one_of(
            st.tuples(st.sampled_from(unary), children).map(lambda t: t[0](t[1])), binary,
        )

    return st.recursive(leaves(atoms, constants), extend, max_leaves=max_leaves)


def limit_free(atoms=("a", "b"), max_leaves=6):
    return formulas(atoms, max_leaves, limits=False)


# -- seeded builders ------------------------------------------------------------

_SLOT_WEIGHTS = {"&": 1, "|": 1, "X": 1, "U": 1, "W": 1, "R": 1, "M": 1, "GF": 0.3, "FG": 0.3,
                 "ap": 1, "nap": 1}


def small_formula(rng: random.Random, max_nodes: int = 6, atoms: int = 2) -> Formula:
    spec = GeneratorSpec("random", seed=rng.randrange(2**32), target_size=rng.randint(1, max_nodes),
                         atom_count=atoms, weights=_SLOT_WEIGHTS)
    return random_formula(spec)


def _leaf_positions(f: Formula, path=()):
    if not f.children:
        yield path
    for i, c in enumerate(f.children):
        yield from _leaf_positions(c, path + (i,))


def _put(f: Formula, path, g: Formula) -> Formula:
    if not path:
        return g
    kids = list(f.children)
    kids[path[0]] = _put(kids[path[0]], path[1:], g)
    return f.rebuild(tuple(kids))


def small_context(rng: random.Random, max_nodes: int = 6, atoms: int = 2) -> Formula:
    """Body of a random context with one or two holes at leaf positions."""
    f = small_formula(rng, max_nodes, atoms)
    spots = list(_leaf_positions(f))
    for path in rng.sample(spots, min(len(spots), rng.choice((1, 2)))):
        f = _put(f, path, HOLE)
    return f


def contexts(atoms=("a", "b"), max_leaves=6):
    """Context bodies: formulas with at least one placeholder leaf."""
    pool = st.sampled_from([HOLE] + [Atom(x) for x in atoms] + [NegAtom(x) for x in atoms])

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from(UNARY), children).map(lambda t: t[0](t[1])),
            st.tuples(st.sampled_from(BINARY), children, children).map(lambda t: t[0](t[1], t[2])),
        )

    return st.recursive(pool, extend, max_leaves=max_leaves).filter(
        lambda f: HOLE in _nodes(f))


def _nodes(f):
    from ltlnorm.formula import subformulas

    return subformulas(f)
