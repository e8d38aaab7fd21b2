"""Normalization of LTL formulas into the Delta_2 normal form.

Formulas are immutable, interned trees in negation normal form with GF/FG
as single limit operators. ``normalize`` rewrites any formula into an
equivalent one where no U is under a W, no limit operator is under a
temporal operator, no W is under a GF and no U is under an FG.
"""

import sys

from .analysis import (
    HierarchyClass, Measures, Verdict, belongs_to, classify, dag_size, gfba,
    is_delta2_combination, is_dual_normal_form, is_normal_form, is_stage_form,
    measures, rank, ubw,
)
from .formula import (
    FALSE, HOLE, TRUE, And, Atom, Const, Context, Formula, LimitFG, LimitGF,
    NegAtom, Next, Or, Release, StrongRelease, Until, WeakUntil,
    abstract_occurrences, atoms, fill, negate_nnf, subformulas,
)
from .normalize import (
    BoundViolation, InvariantViolation, NormalizationTimeout, NormalizeOptions,
    RewriteBudgetExceeded, RewriteStep, RewriteTrace, normalize, normalize_dual,
    stage1, stage2, stage3,
)
from .oracle import (
    BoundTooLarge, EquivVerdict, LassoWord, bounded_entails, bounded_equiv,
    count_lassos, enumerate_lassos, evaluate,
)
from .rewrite import RuleId, ShapeMismatch, apply_rule, lhs
from .simplify import simplify
from .syntax import ParseError, parse, render

# Rewriting and evaluation recurse over the formula structure.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__all__ = [
    "Formula", "Const", "Atom", "NegAtom", "And", "Or", "Next", "Until",
    "WeakUntil", "Release", "StrongRelease", "LimitGF", "LimitFG", "TRUE",
    "FALSE", "HOLE", "Context", "abstract_occurrences", "atoms", "fill",
    "negate_nnf", "subformulas", "parse", "render", "ParseError",
    "Measures", "measures", "ubw", "gfba", "dag_size", "rank",
    "HierarchyClass", "belongs_to", "classify", "Verdict", "is_normal_form",
    "is_dual_normal_form", "is_stage_form", "is_delta2_combination",
    "RuleId", "ShapeMismatch", "apply_rule", "lhs", "simplify",
    "NormalizeOptions", "RewriteStep", "RewriteTrace", "InvariantViolation",
    "BoundViolation", "RewriteBudgetExceeded", "NormalizationTimeout",
    "normalize", "normalize_dual", "stage1", "stage2", "stage3",
    "LassoWord", "EquivVerdict", "BoundTooLarge", "evaluate", "bounded_equiv",
    "bounded_entails", "enumerate_lassos", "count_lassos",
]
