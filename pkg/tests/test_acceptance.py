"""Acceptance checks. Each test prints one PASS/FAIL line (run with ``-s`` to
see them next to pytest's own output; they are printed either way)."""

import io
import random
import time

import numpy as np
import pytest

from ltlnorm import (
    FALSE, TRUE, And, Atom, Context, LimitFG, LimitGF, NegAtom, Next, Or,
    Release, StrongRelease, Until, WeakUntil, parse,
)
from ltlnorm.analysis import (
    HierarchyClass, classify, gfba, is_delta2_combination, is_normal_form,
    is_stage_form,
)
from ltlnorm.bench import run_benchmark
from ltlnorm.cli import main
from ltlnorm.formula import LIMIT, iter_nodes
from ltlnorm.generators import family_wu_nested, family_wu_star, random_corpus
from ltlnorm.normalize import BoundViolation, InvariantViolation, normalize, stage3
from ltlnorm.oracle import (
    LassoWord, bounded_equiv, enumerate_lassos, evaluate, evaluate_valuations,
)
from ltlnorm.rewrite import RULE_SLOTS, RuleId, apply_rule, lhs

import naive
from strategies import small_context, small_formula

CORPUS_SEED, CORPUS_SIZE, CORPUS_ATOMS, CORPUS_COUNT = 0, 25, 4, 1000


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return emit


def _normalize_all(formulas):
    """(input, output, trace) triples plus the inputs that raised."""
    done, failed = [], []
    for f in formulas:
        try:
            g, trace = normalize(f)
        except InvariantViolation as exc:
            failed.append((f, exc))
            continue
        done.append((f, g, trace))
    return done, failed


@pytest.fixture(scope="module")
def corpus_runs():
    corpus = random_corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_ATOMS, CORPUS_COUNT)
    start = time.perf_counter()
    done, failed = _normalize_all(corpus)
    return corpus, done, failed, time.perf_counter() - start


@pytest.fixture(scope="module")
def family_runs():
    formulas = [family_wu_star(n) for n in range(2, 201)] + [family_wu_nested(n) for n in range(0, 8)]
    return _normalize_all(formulas)


# -- 1. rule soundness -------------------------------------------------------------


def _instance(rule, rng):
    parts = {}
    for name in RULE_SLOTS[rule]:
        # A limit argument gets one node less so the limit itself stays within six.
        parts[name] = small_formula(rng, 5 if name == "psi" else 6)
    return Context.of(small_context(rng)), parts


def test_rule_soundness(report):
    per_rule, start, failures = 200, time.perf_counter(), []
    for rule in RuleId:
        rng = random.Random(1000 + rule.value)
        for _ in range(per_rule):
            ctx, parts = _instance(rule, rng)
            left, right = lhs(rule, ctx, parts), apply_rule(rule, ctx, parts)
            verdict = bounded_equiv(left, right, 3, 3)
            if not verdict:
                failures.append((rule, left, right, verdict.witness))
    total = per_rule * len(RuleId)
    report(1, not failures, f"{total - len(failures)}/{total} rule instances agree on every lasso "
           f"with prefix<=3, loop<=3 ({time.perf_counter() - start:.1f}s)")
    assert not failures, failures[:3]


# -- 2. end-to-end semantic preservation ------------------------------------------------


def test_semantic_preservation(report, corpus_runs):
    corpus, done, failed, _ = corpus_runs
    start, mismatches = time.perf_counter(), []
    for i, (f, g, _) in enumerate(done):
        verdict = bounded_equiv(f, g, 3, 3, samples=500, seed=i)
        if not verdict:
            mismatches.append((f, g, verdict.witness))
    ok = not mismatches and not failed and len(done) == CORPUS_COUNT
    report(2, ok, f"{len(done)} formulas normalized, {len(failed)} errors, "
           f"{len(mismatches)} counterexamples in 500 sampled words each "
           f"({time.perf_counter() - start:.1f}s)")
    assert ok, (mismatches[:3], failed[:3])


# -- 3. normal-form guarantee -----------------------------------------------------------------


def test_normal_form_guarantee(report, corpus_runs, family_runs):
    _, done, failed, _ = corpus_runs
    fam_done, fam_failed = family_runs
    bad = []
    for f, g, trace in done + fam_done:
        stages = trace.stage_results
        if not (is_normal_form(g) and is_stage_form(stages[1], 1) and is_stage_form(stages[2], 2)
                and stages[3] is g):
            bad.append(f)
    ok = not bad and not failed and not fam_failed
    report(3, ok, f"{len(done) + len(fam_done) - len(bad)}/{len(done) + len(fam_done)} outputs in "
           "normal form with stage-1/stage-2 intermediates in their stage forms")
    assert ok, bad[:3]


# -- 4. size bounds ------------------------------------------------------------------------------


def _top_limits(f):
    out, stack = [], [f]
    while stack:
        n = stack.pop()
        if isinstance(n, (And, Or)):
            stack.extend(n.children)
        elif isinstance(n, LIMIT) and n not in out:
            out.append(n)
    return out


def _bound_failures(f, g, trace):
    s1, s2 = trace.stage_results[1], trace.stage_results[2]
    problems = []
    if s1.size > 4 ** (2 * f.size) * f.size:
        problems.append("stage 1")
    if s2.size > 3 ** gfba(s1) * s1.size:
        problems.append("stage 2")
    limit_sizes = [n.size for n in iter_nodes(s1) if isinstance(n, LIMIT)]
    if any(n.size > max(limit_sizes, default=0) for n in iter_nodes(s2) if isinstance(n, LIMIT)):
        problems.append("stage 2 limit size")
    for lim in _top_limits(s2):
        k = lim.arg.size
        if stage3(lim).size > 3 ** k * k:
            problems.append("stage 3")
    if g.size > 4 ** (7 * f.size):
        problems.append("overall")
    return problems


def test_size_bounds(report, corpus_runs, family_runs):
    _, done, failed, _ = corpus_runs
    fam_done, fam_failed = family_runs
    raised = [exc for _, exc in failed + fam_failed if isinstance(exc, BoundViolation)]
    recomputed = [(f, p) for f, g, t in done + fam_done for p in _bound_failures(f, g, t)]
    ok = not raised and not recomputed and not failed and not fam_failed
    report(4, ok, f"{len(raised)} bound assertions raised, {len(recomputed)} violations on "
           f"recomputation over {len(done) + len(fam_done)} runs")
    assert ok, (raised[:3], recomputed[:3])


# -- 5. the two-rule family ------------------------------------------------------------------------


def test_two_rule_family(report):
    ratios, wrong = [], []
    for n in range(3, 201):
        g, trace = normalize(family_wu_star(n))
        if trace.rules() != [RuleId.UW, RuleId.GF1] or not is_normal_form(g):
            wrong.append(n)
        ratios.append(g.size / n)
    c = max(ratios)
    ok = not wrong and c <= 20
    report(5, ok, f"n=3..200: {198 - len(wrong)}/198 use exactly two rules (UW, GF1); "
           f"max #out/n = {c:.2f} (<= 20), #out(200) = {normalize(family_wu_star(200))[0].size}")
    assert ok, wrong[:5]


# -- 6. scalability witness ---------------------------------------------------------------------------


def test_nested_family_scales(report):
    f6 = family_wu_nested(6)
    start = time.perf_counter()
    g6, trace6 = normalize(f6)
    seconds = time.perf_counter() - start
    f5 = family_wu_nested(5)
    g5, _ = normalize(f5)
    blowup = g5.size / f5.size
    ok = seconds < 10 and is_normal_form(g6) and bool(bounded_equiv(f6, g6, 2, 2, samples=2000))
    report(6, ok, f"wu-nested(6) normalized in {seconds:.3f}s ({len(trace6)} rules, "
           f"{g6.size} nodes); wu-nested(5) tree blowup {g5.size}/{f5.size} = {blowup:.2f}")
    assert ok


# -- 7. classification ------------------------------------------------------------------------------------


def test_classification(report, corpus_runs, family_runs):
    spots = {
        "((a0 U a1) W a2) U a3": "Sigma 3",
        "F G F a": "Sigma 3",
    }
    spot_ok = all(str(classify(parse(t))) == c for t, c in spots.items())
    _, done, _, _ = corpus_runs
    fam_done, _ = family_runs
    delta2 = HierarchyClass("Delta", 2)
    bad = [g for _, g, _ in done + fam_done
           if not (classify(g) <= delta2 and is_delta2_combination(g))]
    ok = spot_ok and not bad
    report(7, ok, f"spot checks {'match' if spot_ok else 'differ'}; "
           f"{len(done) + len(fam_done) - len(bad)}/{len(done) + len(fam_done)} outputs are <= Delta 2 "
           "and positive combinations of Sigma 2 and GF(Sigma 1)")
    assert ok, bad[:3]


# -- 8. benchmark substitute ---------------------------------------------------------------------------------


def _bench_output():
    out = io.StringIO()
    code = main(["bench", "--family", "random", "--seed", str(CORPUS_SEED), "--size", str(CORPUS_SIZE),
                 "--atoms", str(CORPUS_ATOMS), "--count", str(CORPUS_COUNT)], out=out)
    return code, out.getvalue()


def test_benchmark_figures(report):
    code1, first = _bench_output()
    code2, second = _bench_output()
    corpus = random_corpus(CORPUS_SEED, CORPUS_SIZE, CORPUS_ATOMS, CORPUS_COUNT)
    _, summary = run_benchmark(list(enumerate(corpus, start=1)))
    summary_line = first.splitlines()[-1]
    ok = (code1 == code2 == 0 and first == second and summary.mean_tree_blowup < 10
          and summary.timeouts == 0 and f"mean_tree_blowup:{summary.mean_tree_blowup:.6f}" in summary_line)
    report(8, ok, f"mean tree blowup {summary.mean_tree_blowup:.3f} (< 10), worst "
           f"{summary.worst_tree_blowup:.2f}, mean DAG {summary.mean_dag_blowup:.3f}, "
           f"{summary.timeouts} timeouts, output byte-stable: {first == second}")
    assert ok


# -- 9. oracle self-consistency ----------------------------------------------------------------------------------

P = L = 2
UNARY = (Next, LimitGF, LimitFG)
BINARY = (And, Or, Until, WeakUntil, Release, StrongRelease)
p_, q_ = Atom("p"), Atom("q")


def _oracle_table(kind, x, y=None):
    if y is None:
        return evaluate_valuations(kind(p_), P, L, {"p": x})
    return evaluate_valuations(kind(p_, q_), P, L, {"p": x, "q": y})


def _exhaustive_small_formulas(max_size=8):
    """Check every operator over every pair of realizable argument tables.

    Both evaluators compute a node's table from its children's tables alone,
    so agreeing on every (operator, realizable child tables) combination up
    to size ``max_size`` means agreeing on every formula of that size.
    Returns (combinations checked, mismatches, distinct tables)."""
    words = list(enumerate_lassos(("a", "b"), P, L))
    base = naive.valuations(words, P, L, ("a", "b"))
    n_words = len(words)
    leaves = {
        Atom("a"): base["a"], Atom("b"): base["b"],
        NegAtom("a"): ~base["a"], NegAtom("b"): ~base["b"],
        TRUE: np.ones((P + L, n_words), bool), FALSE: np.zeros((P + L, n_words), bool),
    }
    seen, by_size, checked, bad = set(), {1: []}, 0, 0
    for leaf, ref in leaves.items():
        table = evaluate_valuations(leaf, P, L, base)
        bad += int((table != ref).any())
        checked += 1
        if table.tobytes() not in seen:
            seen.add(table.tobytes())
            by_size[1].append(table)

    for n in range(2, max_size + 1):
        cum = {i: [t for s in range(1, i + 1) for t in by_size[s]] for i in range(1, n)}
        new = []

        def keep(tables):
            if n == max_size:
                return
            for t in tables:
                key = t.tobytes()
                if key not in seen:
                    seen.add(key)
                    new.append(t)

        args = np.concatenate(cum[n - 1], axis=1)
        for kind in UNARY:
            got, want = _oracle_table(kind, args), naive.apply_table(kind, P, L, args)
            bad += int((got != want).any())
            checked += len(cum[n - 1])
            keep(np.split(got, len(cum[n - 1]), axis=1))
        for i in range(1, n - 1):
            right = np.concatenate(cum[n - 1 - i], axis=1)
            m = len(cum[n - 1 - i])
            for x in cum[i]:
                left = np.tile(x, (1, m))
                for kind in BINARY:
                    got, want = _oracle_table(kind, left, right), naive.apply_table(kind, P, L, left, right)
                    bad += int((got != want).any())
                    checked += m
                    keep(np.split(got, m, axis=1))
        by_size[n] = new
    return checked, bad, len(seen)


def _suspendability_triples(count=1000, seed=9):
    """Limit formulas keep their value when the word gets a longer prefix."""
    rng = random.Random(seed)
    letters = [frozenset(), frozenset({"a0"}), frozenset({"a1"}), frozenset({"a0", "a1"})]

    def letters_(lo, hi):
        return [rng.choice(letters) for _ in range(rng.randint(lo, hi))]

    bad = 0
    for _ in range(count):
        f = small_formula(rng, 8)
        prefix, loop, extra = letters_(0, 2), letters_(1, 2), letters_(1, 3)
        w, longer = LassoWord(prefix, loop), LassoWord(extra + prefix, loop)
        for limit in (LimitGF(f), LimitFG(f)):
            bad += int(evaluate(w, limit) != evaluate(longer, limit))
    return bad


def _direct_unrolling_sample(count=300, seed=4):
    """Whole-formula comparison against the per-word unrolling semantics."""
    rng = random.Random(seed)
    words = list(enumerate_lassos(("a0", "a1"), P, L))
    bad = 0
    for _ in range(count):
        f = small_formula(rng, 8)
        bad += sum(evaluate(w, f) != naive.holds(f, w) for w in rng.sample(words, 40))
    return bad


def test_oracle_self_consistency(report):
    start = time.perf_counter()
    checked, bad, tables = _exhaustive_small_formulas()
    direct_bad = _direct_unrolling_sample()
    susp_bad = _suspendability_triples()
    ok = bad == 0 and direct_bad == 0 and susp_bad == 0
    report(9, ok, f"{checked} (operator, argument-table) combinations covering all formulas of <= 8 nodes "
           f"over 2 atoms on all {len(list(enumerate_lassos(('a', 'b'), P, L)))} lassos with bounds (2,2): "
           f"{bad} mismatches ({tables} distinct tables); {direct_bad} whole-formula mismatches; "
           f"{susp_bad}/1000 suspendability failures ({time.perf_counter() - start:.1f}s)")
    assert ok
