"""Evaluation on ultimately periodic words and bounded equivalence checks.

A lasso ``u v^w`` has ``|u| + |v|`` distinct suffixes. Satisfaction of every
subformula is tabulated over those positions bottom-up; until/release
operators are solved on the loop with two backward sweeps (the first fixes
the value at the loop entry exactly, the second propagates it around the
seam). Words are evaluated in batches: each table row is a numpy vector
over many words of the same shape.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .formula import (
    And, Atom, Const, Formula, LimitFG, LimitGF, NegAtom, Next, Or, Release,
    StrongRelease, Until, atoms as formula_atoms,
)

__all__ = [
    "LassoWord", "EquivVerdict", "BoundTooLarge", "evaluate", "evaluate_many",
    "satisfaction_table", "evaluate_valuations", "enumerate_lassos", "count_lassos", "bounded_equiv",
    "bounded_entails", "sample_lassos", "DEFAULT_CEILING",
]

DEFAULT_CEILING = 2_000_000
_COMMON_SHAPE_LIMIT = 64

Letter = FrozenSet[str]


def _letter(x) -> Letter:
    return x if isinstance(x, frozenset) else frozenset(x)


@dataclass(frozen=True)
class LassoWord:
    """The infinite word ``prefix . loop^w`` over subsets of ``atoms``."""

    prefix: Tuple[Letter, ...]
    loop: Tuple[Letter, ...]
    atoms: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        prefix = tuple(_letter(x) for x in self.prefix)
        loop = tuple(_letter(x) for x in self.loop)
        if not loop:
            raise ValueError("loop must be nonempty")
        names = set(self.atoms).union(*prefix, *loop)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "loop", loop)
        object.__setattr__(self, "atoms", tuple(sorted(names)))

    def __len__(self) -> int:
        return len(self.prefix) + len(self.loop)

    def letter(self, i: int) -> Letter:
        """The letter at position ``i`` of the infinite word."""
        p = len(self.prefix)
        return self.prefix[i] if i < p else self.loop[(i - p) % len(self.loop)]

    def suffix_class(self, i: int) -> int:
        p = len(self.prefix)
        return i if i < p else p + (i - p) % len(self.loop)

    def rotated(self, k: int) -> "LassoWord":
        """The suffix at loop position ``k`` as a lasso with empty prefix."""
        k %= len(self.loop)
        return LassoWord((), self.loop[k:] + self.loop[:k], self.atoms)

    def __str__(self) -> str:
        def show(letter):
            return "{" + ",".join(sorted(letter)) + "}"

        head = "".join(show(x) for x in self.prefix)
        return f"{head}({''.join(show(x) for x in self.loop)})^w"


class BoundTooLarge(ValueError):
    def __init__(self, size: int, ceiling: int):
        super().__init__(f"{size} lasso words exceed the ceiling of {ceiling}")
        self.size = size
        self.ceiling = ceiling


# -- batched evaluation ----------------------------------------------------------


class _Batch:
    """Words sharing a (prefix, loop) shape; ``bits[a]`` has shape (n, N)."""

    def __init__(self, prefix_len: int, loop_len: int, count: int, bits: Dict[str, np.ndarray]):
        self.P = prefix_len
        self.L = loop_len
        self.n = prefix_len + loop_len
        self.N = count
        self.bits = bits

    def evaluate(self, f: Formula, memo: Optional[dict] = None) -> np.ndarray:
        if memo is None:
            memo = {}
        return self._go(f, memo)

    def _go(self, node: Formula, memo: dict) -> np.ndarray:
        hit = memo.get(node)
        if hit is not None:
            return hit
        n, N, P = self.n, self.N, self.P
        if isinstance(node, Const):
            out = np.full((n, N), node.value)
        elif isinstance(node, Atom):
            out = self.bits.get(node.name)
            if out is None:
                out = np.zeros((n, N), bool)
        elif isinstance(node, NegAtom):
            bits = self.bits.get(node.name)
            out = np.ones((n, N), bool) if bits is None else ~bits
        elif isinstance(node, And):
            out = self._go(node.left, memo) & self._go(node.right, memo)
        elif isinstance(node, Or):
            out = self._go(node.left, memo) | self._go(node.right, memo)
        elif isinstance(node, Next):
            a = self._go(node.arg, memo)
            out = np.empty_like(a)
            out[:-1] = a[1:]
            out[-1] = a[P]
        elif isinstance(node, LimitGF):
            a = self._go(node.arg, memo)
            out = np.broadcast_to(a[P:].any(axis=0), (n, N))
        elif isinstance(node, LimitFG):
            a = self._go(node.arg, memo)
            out = np.broadcast_to(a[P:].all(axis=0), (n, N))
        else:
            a = self._go(node.left, memo)
            b = self._go(node.right, memo)
            strong = isinstance(node, (Until, StrongRelease))
            release = isinstance(node, (Release, StrongRelease))
            out = _fixpoint(a, b, P, strong, release)
        memo[node] = out
        return out


def _fixpoint(a: np.ndarray, b: np.ndarray, P: int, strong: bool, release: bool) -> np.ndarray:
    """Until-like operators: x_i = b_i | (a_i & x_{i+1}); release-like:
    x_i = b_i & (a_i | x_{i+1}). Least fixpoint when ``strong``."""
    n = a.shape[0]
    out = np.empty(b.shape, bool)
    nxt = np.full(b.shape[1], not strong)
    for _sweep in range(2):
        for i in range(n - 1, P - 1, -1):
            nxt = (b[i] & (a[i] | nxt)) if release else (b[i] | (a[i] & nxt))
            out[i] = nxt
    for i in range(P - 1, -1, -1):
        nxt = (b[i] & (a[i] | nxt)) if release else (b[i] | (a[i] & nxt))
        out[i] = nxt
    return out


def _batch_from_words(words: Sequence[LassoWord], P: int, L: int, names: Sequence[str]) -> _Batch:
    n = P + L
    bits = {a: np.zeros((n, len(words)), bool) for a in names}
    for j, w in enumerate(words):
        for i in range(n):
            for a in w.letter(i):
                if a in bits:
                    bits[a][i, j] = True
    return _Batch(P, L, len(words), bits)


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def _plan_shapes(shapes: Iterable[Tuple[int, int]]) -> Dict[Tuple[int, int], Tuple[int, int]]:
    """Map each (p, l) to the shape its words are evaluated on: one common
    shape when small enough, otherwise its own."""
    shapes = set(shapes)
    P = max(p for p, _ in shapes)
    L = _lcm(l for _, l in shapes)
    if P + L <= _COMMON_SHAPE_LIMIT:
        return {s: (P, L) for s in shapes}
    return {s: s for s in shapes}


def _batches_for(words: Sequence[LassoWord], names: Sequence[str]) -> List[Tuple[np.ndarray, _Batch]]:
    plan = _plan_shapes((len(w.prefix), len(w.loop)) for w in words)
    groups: Dict[Tuple[int, int], List[int]] = {}
    for idx, w in enumerate(words):
        groups.setdefault(plan[(len(w.prefix), len(w.loop))], []).append(idx)
    out = []
    for (P, L), idxs in sorted(groups.items()):
        out.append((np.array(idxs), _batch_from_words([words[i] for i in idxs], P, L, names)))
    return out


def evaluate_many(words: Sequence[LassoWord], *formulas: Formula) -> List[np.ndarray]:
    """Truth value of each formula on each word (one bool vector per formula)."""
    if not words:
        return [np.zeros(0, bool) for _ in formulas]
    names = sorted(set().union(*(w.atoms for w in words)))
    results = [np.zeros(len(words), bool) for _ in formulas]
    for idxs, batch in _batches_for(words, names):
        memo: dict = {}
        for res, f in zip(results, formulas):
            res[idxs] = batch.evaluate(f, memo)[0]
    return results


def evaluate(w: LassoWord, f: Formula) -> bool:
    """Whether ``w`` satisfies ``f``. Atoms outside the word's letters are false."""
    return bool(evaluate_many([w], f)[0][0])


def evaluate_valuations(
    f: Formula, prefix_len: int, loop_len: int, valuation: Mapping[str, np.ndarray]
) -> np.ndarray:
    """Evaluate ``f`` on a batch of words of one shape given directly by atom
    valuations: ``valuation[a][i, j]`` says whether atom ``a`` holds at
    position ``i`` of word ``j``. Returns the (positions, words) table of ``f``.
    Atoms without a valuation are false."""
    arrays = {a: np.asarray(v, dtype=bool) for a, v in valuation.items()}
    n = prefix_len + loop_len
    if loop_len < 1 or prefix_len < 0:
        raise ValueError("need prefix_len >= 0 and loop_len >= 1")
    count = None
    for a, v in arrays.items():
        if v.ndim != 2 or v.shape[0] != n or (count is not None and v.shape[1] != count):
            raise ValueError(f"valuation of {a} has shape {v.shape}, expected ({n}, N)")
        count = v.shape[1]
    return _Batch(prefix_len, loop_len, count or 0, arrays).evaluate(f)


def satisfaction_table(w: LassoWord, f: Formula) -> List[bool]:
    """Truth of ``f`` on each of the ``|prefix| + |loop|`` distinct suffixes."""
    batch = _batch_from_words([w], len(w.prefix), len(w.loop), w.atoms)
    return [bool(x) for x in batch.evaluate(f)[:, 0]]


# -- enumeration -------------------------------------------------------------------


def _shapes(max_prefix: int, max_loop: int) -> Iterator[Tuple[int, int]]:
    """Shapes ordered by total length, then prefix length."""
    for total in range(1, max_prefix + max_loop + 1):
        for p in range(0, min(max_prefix, total - 1) + 1):
            if 1 <= total - p <= max_loop:
                yield p, total - p


def count_lassos(n_atoms: int, max_prefix: int, max_loop: int) -> int:
    sigma = 2 ** n_atoms
    return sum(sigma ** (p + l) for p, l in _shapes(max_prefix, max_loop))


def _letter_of(code: int, names: Sequence[str]) -> Letter:
    return frozenset(a for k, a in enumerate(names) if code >> k & 1)


def enumerate_lassos(atoms: Iterable[str], max_prefix: int, max_loop: int) -> Iterator[LassoWord]:
    """All lassos with ``|prefix| <= max_prefix`` and ``1 <= |loop| <= max_loop``,
    shorter words first, then lexicographically by letter code."""
    if max_loop < 1 or max_prefix < 0:
        raise ValueError("need max_prefix >= 0 and max_loop >= 1")
    names = tuple(sorted(set(atoms)))
    letters = [_letter_of(c, names) for c in range(2 ** len(names))]
    for p, l in _shapes(max_prefix, max_loop):
        for combo in product(letters, repeat=p + l):
            yield LassoWord(combo[:p], combo[p:], names)


def _decode(index: int, names: Sequence[str], max_prefix: int, max_loop: int) -> LassoWord:
    sigma = 2 ** len(names)
    for p, l in _shapes(max_prefix, max_loop):
        block = sigma ** (p + l)
        if index < block:
            codes = []
            for _ in range(p + l):
                index, c = divmod(index, sigma)
                codes.append(c)
            codes.reverse()
            letters = [_letter_of(c, names) for c in codes]
            return LassoWord(letters[:p], letters[p:], names)
        index -= block
    raise IndexError("index beyond enumeration")


def sample_lassos(atoms: Iterable[str], max_prefix: int, max_loop: int, n: int, seed: int) -> List[LassoWord]:
    """``n`` words drawn uniformly (with replacement) from the enumeration space."""
    names = tuple(sorted(set(atoms)))
    total = count_lassos(len(names), max_prefix, max_loop)
    rng = random.Random(seed)
    return [_decode(rng.randrange(total), names, max_prefix, max_loop) for _ in range(n)]


@lru_cache(maxsize=16)
def _exhaustive(names: Tuple[str, ...], max_prefix: int, max_loop: int):
    """Vectorized batches covering the whole enumeration, with each batch's
    global enumeration offsets."""
    sigma = 2 ** len(names)
    shapes = list(_shapes(max_prefix, max_loop))
    plan = _plan_shapes(shapes)
    offset = 0
    parts = []
    for p, l in shapes:
        count = sigma ** (p + l)
        idx = np.arange(count, dtype=np.int64)
        codes = np.empty((p + l, count), np.int64)
        rest = idx.copy()
        for j in range(p + l - 1, -1, -1):
            rest, codes[j] = np.divmod(rest, sigma)
        P, L = plan[(p, l)]
        src = [i if i < p else p + (i - p) % l for i in range(P + L)]
        bits = {a: ((codes[src] >> k) & 1).astype(bool) for k, a in enumerate(names)}
        parts.append((offset + idx, (P, L), bits, count))
        offset += count
    merged: Dict[Tuple[int, int], list] = {}
    for gidx, shape, bits, count in parts:
        merged.setdefault(shape, []).append((gidx, bits, count))
    out = []
    for (P, L), chunks in sorted(merged.items()):
        gidx = np.concatenate([c[0] for c in chunks])
        bits = {a: np.concatenate([c[1][a] for c in chunks], axis=1) for a in names}
        out.append((gidx, _Batch(P, L, len(gidx), bits)))
    return out


@dataclass(frozen=True)
class EquivVerdict:
    """Outcome of a bounded check. ``equivalent`` means no counterexample
    exists among the words checked, which is not a proof."""

    equivalent: bool
    witness: Optional[LassoWord] = None
    checked: int = 0
    exhaustive: bool = True

    def __post_init__(self):
        if self.equivalent == (self.witness is not None):
            raise ValueError("a witness is present iff the check failed")

    def __bool__(self) -> bool:
        return self.equivalent

    @property
    def outcome(self) -> str:
        return "equivalent-up-to-bound" if self.equivalent else "counterexample"

    def __str__(self) -> str:
        if self.equivalent:
            how = "exhaustive" if self.exhaustive else "sampled"
            return f"equivalent up to bound ({how}, {self.checked} words)"
        return f"counterexample: {self.witness}"


def _compare(
    f: Formula, g: Formula, max_prefix: int, max_loop: int,
    samples: Optional[int], seed: int, ceiling: int, entail: bool,
) -> EquivVerdict:
    if max_loop < 1 or max_prefix < 0:
        raise ValueError("need max_prefix >= 0 and max_loop >= 1")
    names = tuple(sorted(set(formula_atoms(f)) | set(formula_atoms(g))))

    def bad(x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return (x & ~y) if entail else (x != y)

    if samples is not None:
        words = sample_lassos(names, max_prefix, max_loop, samples, seed)
        x, y = evaluate_many(words, f, g)
        hits = np.flatnonzero(bad(x, y))
        if hits.size:
            return EquivVerdict(False, words[hits[0]], len(words), False)
        return EquivVerdict(True, None, len(words), False)

    size = count_lassos(len(names), max_prefix, max_loop)
    if size > ceiling:
        raise BoundTooLarge(size, ceiling)
    first = None
    for gidx, batch in _exhaustive(names, max_prefix, max_loop):
        memo: dict = {}
        x = batch.evaluate(f, memo)[0]
        y = batch.evaluate(g, memo)[0]
        hits = gidx[bad(x, y)]
        if hits.size:
            cand = int(hits.min())
            first = cand if first is None else min(first, cand)
    if first is not None:
        return EquivVerdict(False, _decode(first, names, max_prefix, max_loop), size)
    return EquivVerdict(True, None, size)


def bounded_equiv(
    f: Formula, g: Formula, max_prefix: int = 3, max_loop: int = 3, *,
    samples: Optional[int] = None, seed: int = 0, ceiling: int = DEFAULT_CEILING,
) -> EquivVerdict:
    """Compare ``f`` and ``g`` on every lasso within the bounds, or on
    ``samples`` uniformly drawn ones. The witness is the first distinguishing
    word in enumeration (or sampling) order."""
    return _compare(f, g, max_prefix, max_loop, samples, seed, ceiling, entail=False)


def bounded_entails(
    f: Formula, g: Formula, max_prefix: int = 3, max_loop: int = 3, *,
    samples: Optional[int] = None, seed: int = 0, ceiling: int = DEFAULT_CEILING,
) -> EquivVerdict:
    """Like :func:`bounded_equiv` but only looks for words satisfying ``f``
    and violating ``g``."""
    return _compare(f, g, max_prefix, max_loop, samples, seed, ceiling, entail=True)
