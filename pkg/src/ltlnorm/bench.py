"""Benchmark harness: corpus loading, timed normalization, blowup statistics.

Record line format (fields in this order, space separated)::

    id:<n> in_nodes:<n> in_dag:<n> out_nodes:<n> out_dag:<n>
    tree_blowup:<x> dag_blowup:<x> rules:<n> ms:<x>

Timed-out formulas print ``timeout`` in place of every output-dependent
value. Wall-clock figures are replaced by ``-`` unless timing output is
requested, so the default output is byte-stable for a fixed corpus.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .analysis import dag_size
from .formula import Formula
from .normalize import NormalizationTimeout, NormalizeOptions, normalize
from .oracle import LassoWord, bounded_equiv
from .syntax import ParseError, parse

__all__ = [
    "CorpusError", "VerificationFailure", "BenchRecord", "BenchSummary",
    "EquivCheck", "load_corpus", "run_benchmark", "summarize",
    "format_record", "format_summary", "DEFAULT_TIMEOUT",
]

DEFAULT_TIMEOUT = 60.0


class CorpusError(ValueError):
    def __init__(self, line: int, error: ParseError):
        super().__init__(f"line {line}: {error}")
        self.line = line
        self.error = error


class VerificationFailure(RuntimeError):
    def __init__(self, formula_id: int, witness: LassoWord):
        super().__init__(f"formula {formula_id}: output differs from input on {witness}")
        self.formula_id = formula_id
        self.witness = witness


@dataclass(frozen=True)
class EquivCheck:
    """Oracle check applied to every output: exhaustive unless ``samples``."""

    max_prefix: int
    max_loop: int
    samples: Optional[int] = 500
    seed: int = 0


@dataclass(frozen=True)
class BenchRecord:
    formula_id: int
    input_nodes: int
    input_dag: int
    output_nodes: Optional[int]
    output_dag: Optional[int]
    tree_blowup: Optional[float]
    dag_blowup: Optional[float]
    rule_applications: Optional[int]
    wall_time: float  # milliseconds
    stage_times: Tuple[float, float, float]  # milliseconds

    @property
    def timed_out(self) -> bool:
        return self.output_nodes is None


@dataclass(frozen=True)
class BenchSummary:
    formulas: int
    completed: int
    timeouts: int
    mean_tree_blowup: float
    worst_tree_blowup: float
    mean_dag_blowup: float
    worst_dag_blowup: float
    total_ms: float


def load_corpus(
    path: Union[str, Path], *, skip_invalid: bool = False,
    errors: Optional[list] = None,
) -> List[Tuple[int, Formula]]:
    """Formulas of a text file, one per line, keyed by 1-based line number.

    Blank lines and lines starting with ``#`` are ignored. An unparsable
    line raises :class:`CorpusError`, or is skipped (and appended to
    ``errors`` if given) when ``skip_invalid`` is set.
    """
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                out.append((lineno, parse(text)))
            except ParseError as exc:
                err = CorpusError(lineno, exc)
                if not skip_invalid:
                    raise err from exc
                if errors is not None:
                    errors.append(err)
    return out


def run_benchmark(
    corpus: Sequence[Tuple[int, Formula]],
    opts: Optional[NormalizeOptions] = None,
    equiv_check: Optional[EquivCheck] = None,
    *,
    timeout: Optional[float] = DEFAULT_TIMEOUT,
) -> Tuple[List[BenchRecord], BenchSummary]:
    """Normalize every formula and collect blowup statistics.

    Timed-out formulas are recorded but excluded from the means. With
    ``equiv_check`` each output is compared with its input by the oracle;
    the first mismatch raises :class:`VerificationFailure`.
    """
    if not corpus:
        raise ValueError("empty corpus")
    base = opts or NormalizeOptions()
    if timeout is not None:
        base = dataclasses.replace(base, timeout=timeout)
    records = []
    for fid, f in sorted(corpus, key=lambda item: item[0]):
        in_nodes, in_dag = f.size, dag_size(f)
        start = time.perf_counter()
        try:
            g, trace = normalize(f, base)
        except NormalizationTimeout:
            ms = (time.perf_counter() - start) * 1000
            records.append(BenchRecord(fid, in_nodes, in_dag, None, None, None, None, None, ms, (0.0, 0.0, 0.0)))
            continue
        ms = (time.perf_counter() - start) * 1000
        if equiv_check is not None:
            verdict = bounded_equiv(
                f, g, equiv_check.max_prefix, equiv_check.max_loop,
                samples=equiv_check.samples, seed=equiv_check.seed,
            )
            if not verdict:
                raise VerificationFailure(fid, verdict.witness)
        out_dag = dag_size(g)
        stages = tuple(trace.stage_seconds.get(s, 0.0) * 1000 for s in (1, 2, 3))
        records.append(BenchRecord(
            fid, in_nodes, in_dag, g.size, out_dag,
            g.size / in_nodes, out_dag / in_dag, len(trace), ms, stages,
        ))
    return records, summarize(records)


def summarize(records: Iterable[BenchRecord]) -> BenchSummary:
    records = list(records)
    done = [r for r in records if not r.timed_out]
    tree = [r.tree_blowup for r in done]
    dag = [r.dag_blowup for r in done]
    return BenchSummary(
        formulas=len(records),
        completed=len(done),
        timeouts=len(records) - len(done),
        mean_tree_blowup=sum(tree) / len(tree) if tree else 0.0,
        worst_tree_blowup=max(tree, default=0.0),
        mean_dag_blowup=sum(dag) / len(dag) if dag else 0.0,
        worst_dag_blowup=max(dag, default=0.0),
        total_ms=sum(r.wall_time for r in records),
    )


def _ms(value: float, timing: bool) -> str:
    return f"{value:.3f}" if timing else "-"


def format_record(r: BenchRecord, *, timing: bool = False) -> str:
    if r.timed_out:
        out = ["timeout"] * 5
    else:
        out = [str(r.output_nodes), str(r.output_dag), f"{r.tree_blowup:.6f}",
               f"{r.dag_blowup:.6f}", str(r.rule_applications)]
    fields = [
        ("id", str(r.formula_id)), ("in_nodes", str(r.input_nodes)), ("in_dag", str(r.input_dag)),
        ("out_nodes", out[0]), ("out_dag", out[1]), ("tree_blowup", out[2]),
        ("dag_blowup", out[3]), ("rules", out[4]), ("ms", _ms(r.wall_time, timing)),
    ]
    return " ".join(f"{k}:{v}" for k, v in fields)


def format_summary(s: BenchSummary, *, timing: bool = False) -> str:
    fields = [
        ("formulas", str(s.formulas)), ("completed", str(s.completed)),
        ("timeouts", str(s.timeouts)), ("mean_tree_blowup", f"{s.mean_tree_blowup:.6f}"),
        ("worst_tree_blowup", f"{s.worst_tree_blowup:.6f}"),
        ("mean_dag_blowup", f"{s.mean_dag_blowup:.6f}"),
        ("worst_dag_blowup", f"{s.worst_dag_blowup:.6f}"),
        ("total_ms", _ms(s.total_ms, timing)),
    ]
    return "summary " + " ".join(f"{k}:{v}" for k, v in fields)
