"""Three-stage normalization into the Delta_2 normal form.

Stage 1 removes U-nodes (and M-nodes) under W-nodes (and R-nodes) outside
limit operators, stage 2 pulls limit subformulas to the Boolean top level,
and stage 3 removes W-nodes under GF and U-nodes under FG. Every stage
checks its termination measure and size bound as it runs; a violated bound
raises :class:`BoundViolation` rather than being logged.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from .analysis import (
    gfba, is_normal_form, is_stage_form, limit_obstacles, limits_under_temporal,
)
from .formula import (
    BOOLEAN, LIMIT, U_LIKE, W_LIKE, And, Formula, LimitFG, LimitGF,
    Next, Or, Release, StrongRelease, Until, WeakUntil, iter_nodes,
    negate_nnf, replace,
)
from .rewrite import RuleId, build_rhs
from .simplify import SMART, Simplifier
from .syntax import render

__all__ = [
    "NormalizeOptions", "RewriteStep", "RewriteTrace", "InvariantViolation",
    "BoundViolation", "RewriteBudgetExceeded", "NormalizationTimeout",
    "normalize", "normalize_dual", "stage1", "stage2", "stage3",
]


class InvariantViolation(RuntimeError):
    """A property guaranteed by construction failed to hold."""


class BoundViolation(InvariantViolation):
    """A size bound of the procedure was exceeded."""


class RewriteBudgetExceeded(InvariantViolation):
    """More rule applications than ``NormalizeOptions.max_steps``."""


class NormalizationTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class NormalizeOptions:
    dual: bool = False
    broad_replacement: bool = False
    simplify: bool = True
    stage_limit: int = 3
    max_steps: int = 1_000_000
    timeout: Optional[float] = None  # seconds, checked between rule applications

    def __post_init__(self):
        if self.stage_limit not in (1, 2, 3):
            raise ValueError("stage_limit must be 1, 2 or 3")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")


@dataclass(frozen=True)
class RewriteStep:
    stage: int
    rule: RuleId
    redex_formula: Formula = field(repr=False)
    result_nodes: int

    @property
    def redex(self) -> str:
        return render(self.redex_formula)

    def __str__(self) -> str:
        return f"stage {self.stage} {self.rule}: {self.redex} -> {self.result_nodes} nodes"


class RewriteTrace:
    """Append-only record of rule applications, plus each stage's output
    and running time."""

    def __init__(self):
        self._steps: List[RewriteStep] = []
        self.stage_results: Dict[int, Formula] = {}
        self.stage_seconds: Dict[int, float] = {}

    def append(self, step: RewriteStep) -> None:
        self._steps.append(step)

    @property
    def steps(self) -> Tuple[RewriteStep, ...]:
        return tuple(self._steps)

    def rules(self) -> List[RuleId]:
        return [s.rule for s in self._steps]

    def __len__(self) -> int:
        return len(self._steps)

    def __iter__(self) -> Iterator[RewriteStep]:
        return iter(self._steps)


_PLAIN = {
    And: And, Or: Or, Next: Next, Until: Until, WeakUntil: WeakUntil,
    Release: Release, StrongRelease: StrongRelease, LimitGF: LimitGF, LimitFG: LimitFG,
}


def _key(node: Formula) -> Formula:
    """The argument a rule's right-hand side keeps from its target: the
    goal of U and R, the trigger of M and W."""
    return node.right if isinstance(node, (Until, Release)) else node.left


class _Engine:
    def __init__(self, opts: NormalizeOptions, trace: RewriteTrace):
        self.opts = opts
        self.trace = trace
        self.cons = SMART if opts.simplify else _PLAIN
        self.simp: Callable[[Formula], Formula] = Simplifier() if opts.simplify else (lambda f: f)
        self.deadline = None if opts.timeout is None else time.monotonic() + opts.timeout
        self._uc: Dict[Formula, Tuple[int, int]] = {}
        self._has_limit: Dict[Formula, bool] = {}
        self.memo1: Dict[Formula, Formula] = {}
        self.memo2: Dict[Formula, Formula] = {}
        self.memo3: Dict[Formula, Formula] = {}

    def mk(self, kind, *children: Formula) -> Formula:
        return self.cons[kind](*children)

    # -- bookkeeping -------------------------------------------------------

    def record(self, stage: int, rule: RuleId, redex: Formula, rhs: Formula) -> None:
        if len(self.trace) >= self.opts.max_steps:
            raise RewriteBudgetExceeded(f"more than {self.opts.max_steps} rule applications")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise NormalizationTimeout(f"normalization exceeded {self.opts.timeout} s")
        self.trace.append(RewriteStep(stage, rule, redex, self.simp(rhs).size))

    def ucount(self, node: Formula) -> Tuple[int, int]:
        """(U-like nodes outside limits, those of them under a W-like node)."""
        hit = self._uc.get(node)
        if hit is not None:
            return hit
        if isinstance(node, LIMIT) or not node.children:
            out = (0, 0)
        else:
            total = under = 0
            for c in node.children:
                t, u = self.ucount(c)
                total += t
                under += u
            if isinstance(node, W_LIKE):
                under = total
            if isinstance(node, U_LIKE):
                total += 1
            out = (total, under)
        self._uc[node] = out
        return out

    def rank(self, node: Formula) -> int:
        return node.size + self.ucount(node)[1]

    def has_limit(self, node: Formula) -> bool:
        hit = self._has_limit.get(node)
        if hit is None:
            hit = isinstance(node, LIMIT) or any(self.has_limit(c) for c in node.children)
            self._has_limit[node] = hit
        return hit

    @staticmethod
    def topmost(x: Formula, kinds) -> List[Formula]:
        """Distinct ``kinds`` nodes of ``x`` outside limits with no ``kinds``
        ancestor, in preorder."""
        found: Dict[Formula, None] = {}
        seen = set()
        stack = [x]
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            if isinstance(n, kinds):
                found.setdefault(n)
            elif not isinstance(n, LIMIT):
                stack.extend(reversed(n.children))
        return list(found)

    @staticmethod
    def maximal(cands: List[Formula]) -> Formula:
        """First candidate (preorder) that is no proper subformula of another."""
        inner = set()
        stack = [c for n in cands for c in n.children]
        while stack:
            n = stack.pop()
            if n not in inner:
                inner.add(n)
                stack.extend(n.children)
        return next(c for c in cands if c not in inner)

    def plug(self, body: Formula, target: Formula, *, skip_limits: bool):
        if self.opts.broad_replacement and not isinstance(target, LIMIT):
            kind, key = type(target), _key(target)

            def match(n):
                return type(n) is kind and _key(n) is key
        else:
            def match(n):
                return n is target

        def fill(transform):
            return replace(body, lambda n: transform(n) if match(n) else None,
                           skip_limits=skip_limits)

        return fill

    # -- stage 1 -------------------------------------------------------------

    def s1(self, f: Formula) -> Formula:
        hit = self.memo1.get(f)
        if hit is not None:
            return hit
        if not f.children or isinstance(f, LIMIT):
            out = f
        elif isinstance(f, W_LIKE) and self.ucount(f)[1] == 0:
            out = f
        elif isinstance(f, WeakUntil):
            out = self._s1_weak_until(f)
        elif isinstance(f, Release):
            out = self._s1_release(f)
        else:
            out = self.mk(type(f), *(self.s1(c) for c in f.children))
        self.memo1[f] = out
        return out

    def _s1_smaller(self, rho: Formula, parent: Formula) -> Formula:
        rho = self.simp(rho)
        if self.rank(rho) >= self.rank(parent):
            raise InvariantViolation(f"stage-1 rank did not decrease at {parent}")
        return self.s1(rho)

    def _s1_weak_until(self, f: WeakUntil) -> Formula:
        phi1, phi2 = f.left, f.right
        if self.ucount(phi2)[0]:
            t = self.topmost(phi2, U_LIKE)[0]
            rule = RuleId.WU if isinstance(t, Until) else RuleId.WM
            rhs = build_rhs(rule, self.plug(phi2, t, skip_limits=True),
                            {"phi1": phi1, "psi1": t.left, "psi2": t.right})
            self.record(1, rule, f, rhs)
            # (phi1 U phi2) | G phi1
            return self.mk(Or, self.mk(Until, self.s1(phi1), self.s1(phi2)),
                           self._s1_smaller(rhs.right, f))
        t = self.maximal(self.topmost(phi1, U_LIKE))
        rule = RuleId.UW if isinstance(t, Until) else RuleId.MW
        rhs = build_rhs(rule, self.plug(phi1, t, skip_limits=True),
                        {"phi2": phi2, "psi1": t.left, "psi2": t.right})
        self.record(1, rule, f, rhs)
        # (GF key & rho1) | (rho2 U rho3)
        (gf, rho1), (rho2, rho3) = rhs.left.children, rhs.right.children
        return self.mk(
            Or,
            self.mk(And, self.simp(gf), self._s1_smaller(rho1, f)),
            self.mk(Until, self._s1_smaller(rho2, f), self._s1_smaller(rho3, f)),
        )

    def _s1_release(self, f: Release) -> Formula:
        phi1, phi2 = f.left, f.right
        if self.ucount(phi1)[0]:
            t = self.topmost(phi1, U_LIKE)[0]
            rule = RuleId.UR if isinstance(t, Until) else RuleId.MR
            rhs = build_rhs(rule, self.plug(phi1, t, skip_limits=True),
                            {"phi2": phi2, "psi1": t.left, "psi2": t.right})
            self.record(1, rule, f, rhs)
            # (phi1 M phi2) | G phi2
            return self.mk(Or, self.mk(StrongRelease, self.s1(phi1), self.s1(phi2)),
                           self._s1_smaller(rhs.right, f))
        t = self.maximal(self.topmost(phi2, U_LIKE))
        rule = RuleId.RU if isinstance(t, Until) else RuleId.RM
        rhs = build_rhs(rule, self.plug(phi2, t, skip_limits=True),
                        {"phi1": phi1, "psi1": t.left, "psi2": t.right})
        self.record(1, rule, f, rhs)
        # (GF key & rho1) | (rho2 M rho3)
        (gf, rho1), (rho2, rho3) = rhs.left.children, rhs.right.children
        return self.mk(
            Or,
            self.mk(And, self.simp(gf), self._s1_smaller(rho1, f)),
            self.mk(StrongRelease, self._s1_smaller(rho2, f), self._s1_smaller(rho3, f)),
        )

    def stage1(self, f: Formula) -> Formula:
        out = self.s1(f)
        _require(out.size <= 4 ** (2 * f.size) * f.size, BoundViolation,
                 f"stage 1 output has {out.size} nodes, input {f.size}")
        _require(is_stage_form(out, 1), InvariantViolation, "stage 1 left a U-node under a W-node")
        self._check_limit_property(f, out)
        return out

    @staticmethod
    def _check_limit_property(f: Formula, out: Formula) -> None:
        subs = set(iter_nodes(f))
        for n in iter_nodes(out):
            if isinstance(n, LimitGF) and n.arg not in subs:
                raise InvariantViolation(f"new limit argument {n.arg} is not a subformula of the input")
            if isinstance(n, LimitFG) and n not in subs:
                raise InvariantViolation(f"new {n} is not a subformula of the input")

    # -- stage 2 -------------------------------------------------------------

    def s2(self, f: Formula) -> Formula:
        hit = self.memo2.get(f)
        if hit is not None:
            return hit
        lowest = next((n for n in limits_under_temporal(f) if not self.has_limit(n.arg)), None)
        if lowest is None:
            out = f
        else:
            rule = RuleId.GF1 if isinstance(lowest, LimitGF) else RuleId.FG1
            rhs = build_rhs(rule, self.plug(f, lowest, skip_limits=False), {"psi": lowest.arg})
            self.record(2, rule, f, rhs)
            (psi, on_true), on_false = rhs.left.children, rhs.right
            out = self.mk(Or, self.mk(And, psi, self.s2(self.simp(on_true))),
                          self.s2(self.simp(on_false)))
        self.memo2[f] = out
        return out

    def stage2(self, f: Formula) -> Formula:
        out = self.s2(f)
        _require(out.size <= 3 ** gfba(f) * f.size, BoundViolation,
                 f"stage 2 output has {out.size} nodes, input {f.size}")
        bound = _max_limit_size(f)
        _require(_max_limit_size(out) <= bound, BoundViolation,
                 "stage 2 enlarged a limit subformula")
        _require(is_stage_form(out, 2), InvariantViolation, "stage 2 left a limit under a temporal node")
        return out

    # -- stage 3 -------------------------------------------------------------

    def s3(self, f: Formula) -> Formula:
        hit = self.memo3.get(f)
        if hit is not None:
            return hit
        if isinstance(f, BOOLEAN):
            out = self.mk(type(f), self.s3(f.left), self.s3(f.right))
        elif isinstance(f, LimitGF):
            out = self._s3_limit(f, W_LIKE, {WeakUntil: RuleId.GF2, Release: RuleId.GFR})
        elif isinstance(f, LimitFG):
            out = self._s3_limit(f, U_LIKE, {Until: RuleId.FG2, StrongRelease: RuleId.FGM})
        else:
            out = f
        self.memo3[f] = out
        return out

    def _s3_limit(self, f: Formula, kinds, rules) -> Formula:
        cands = self.topmost(f.arg, kinds)
        if not cands:
            return f
        t = self.maximal(cands)
        rule = rules[type(t)]
        rhs = build_rhs(rule, self.plug(f.arg, t, skip_limits=False),
                        {"psi1": t.left, "psi2": t.right})
        self.record(3, rule, f, rhs)
        before = limit_obstacles(f)

        def smaller(g: Formula) -> Formula:
            g = self.simp(g)
            if limit_obstacles(g) >= before:
                raise InvariantViolation(f"stage-3 obstacles did not decrease at {f}")
            return self.s3(g)

        if isinstance(f, LimitGF):
            # GF phi[flip] | (FG key & GF phi[true])
            first, (key, on_true) = rhs.left, rhs.right.children
            return self.mk(Or, smaller(first), self.mk(And, smaller(key), smaller(on_true)))
        # (GF key & FG phi[flip]) | FG phi[false]
        (key, flipped), on_false = rhs.left.children, rhs.right
        return self.mk(Or, self.mk(And, smaller(key), smaller(flipped)), smaller(on_false))

    def stage3(self, f: Formula) -> Formula:
        for limit in _top_limits(f):
            out = self.s3(limit)
            n = limit.arg.size
            _require(out.size <= 3 ** n * n, BoundViolation,
                     f"limit formula with {n}-node argument normalized to {out.size} nodes")
        out = self.s3(f)
        _require(bool(is_normal_form(out)), InvariantViolation, f"stage 3: {is_normal_form(out)}")
        return out


def _require(ok: bool, exc, message: str) -> None:
    if not ok:
        raise exc(message)


def _max_limit_size(f: Formula) -> int:
    return max((n.size for n in iter_nodes(f) if isinstance(n, LIMIT)), default=0)


def _top_limits(f: Formula) -> List[Formula]:
    found: Dict[Formula, None] = {}
    seen = set()
    stack = [f]
    while stack:
        n = stack.pop()
        if n in seen:
            continue
        seen.add(n)
        if isinstance(n, BOOLEAN):
            stack.extend((n.right, n.left))
        elif isinstance(n, LIMIT):
            found.setdefault(n)
    return list(found)


def normalize(
    f: Formula, opts: Optional[NormalizeOptions] = None
) -> Tuple[Formula, RewriteTrace]:
    """Equivalent formula in normal form (dual normal form if ``opts.dual``),
    truncated after ``opts.stage_limit`` stages, with its rewrite trace.

    ``trace.stage_results`` holds each completed stage's output (for the
    negated input when ``opts.dual`` is set).
    """
    opts = opts or NormalizeOptions()
    if opts.dual:
        g, trace = normalize(negate_nnf(f), dataclasses.replace(opts, dual=False))
        return negate_nnf(g), trace
    trace = RewriteTrace()
    eng = _Engine(opts, trace)
    g = eng.simp(f)
    for stage, run in ((1, eng.stage1), (2, eng.stage2), (3, eng.stage3)):
        if stage > opts.stage_limit:
            break
        start = time.perf_counter()
        g = run(g)
        trace.stage_seconds[stage] = time.perf_counter() - start
        trace.stage_results[stage] = g
    _require(g.size <= 4 ** (7 * f.size), BoundViolation,
             f"output has {g.size} nodes for a {f.size}-node input")
    return g, trace


def normalize_dual(f: Formula, opts: Optional[NormalizeOptions] = None) -> Formula:
    """Equivalent formula with no W under U, no limit under a temporal
    operator, no U under FG and no W under GF."""
    opts = dataclasses.replace(opts or NormalizeOptions(), dual=True)
    return normalize(f, opts)[0]


def _single_stage(stage: int, f: Formula, opts, trace) -> Formula:
    opts = opts or NormalizeOptions()
    trace = trace if trace is not None else RewriteTrace()
    eng = _Engine(opts, trace)
    if stage == 2 and not is_stage_form(f, 1):
        raise ValueError("stage 2 needs a formula without U-nodes under W-nodes")
    if stage == 3 and not is_stage_form(f, 2):
        raise ValueError("stage 3 needs a formula in stage-2 form")
    out = (eng.stage1, eng.stage2, eng.stage3)[stage - 1](eng.simp(f))
    trace.stage_results[stage] = out
    return out


def stage1(f: Formula, opts: Optional[NormalizeOptions] = None, trace: Optional[RewriteTrace] = None) -> Formula:
    """Equivalent formula with no U/M-node under a W/R-node outside limits."""
    return _single_stage(1, f, opts, trace)


def stage2(f: Formula, opts: Optional[NormalizeOptions] = None, trace: Optional[RewriteTrace] = None) -> Formula:
    """Pull every limit subformula out of temporal operators."""
    return _single_stage(2, f, opts, trace)


def stage3(f: Formula, opts: Optional[NormalizeOptions] = None, trace: Optional[RewriteTrace] = None) -> Formula:
    """Remove W-nodes under GF and U-nodes under FG."""
    return _single_stage(3, f, opts, trace)
