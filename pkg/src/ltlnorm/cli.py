"""Command-line interface.

Exit codes: 0 success (predicate true), 1 predicate false, 2 usage or parse
error, 3 internal invariant violation or failed verification.
"""

from __future__ import annotations

import argparse
import re
import sys
from typing import Iterable, List, Optional, Tuple

from .analysis import classify, is_dual_normal_form, is_normal_form
from .bench import (
    DEFAULT_TIMEOUT, CorpusError, EquivCheck, VerificationFailure,
    format_record, format_summary, load_corpus, run_benchmark,
)
from .formula import Formula
from .generators import GeneratorSpec, family_wu_nested, family_wu_star, random_corpus
from .normalize import InvariantViolation, NormalizeOptions, normalize
from .oracle import BoundTooLarge, bounded_equiv
from .syntax import ParseError, parse, render

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _bounds(text: str) -> Tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*,\s*(\d+)\s*", text)
    if not m or int(m.group(2)) < 1:
        raise argparse.ArgumentTypeError("expected P,L with P >= 0 and L >= 1")
    return int(m.group(1)), int(m.group(2))


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    # Global flags are accepted before or after the subcommand.
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--file", default=argparse.SUPPRESS,
                        help="read formulas from FILE, one per line ('#' starts a comment)")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="print only essential output")

    parser = argparse.ArgumentParser(prog="ltlnorm", description="Normalize LTL formulas into Delta_2 normal form.")
    parser.add_argument("--file", default=None, help=argparse.SUPPRESS)
    parser.add_argument("--quiet", action="store_true", default=False, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("normalize", parents=[common], help="normalize formulas")
    p.add_argument("formula", nargs="?")
    p.add_argument("--trace", action="store_true", help="print one line per rule application")
    p.add_argument("--stats", action="store_true", help="print node counts to standard error")
    p.add_argument("--stage", type=int, choices=(1, 2, 3), default=3, help="stop after this stage")
    p.add_argument("--dual", action="store_true", help="produce the dual normal form")
    p.add_argument("--no-simplify", action="store_true", help="disable eager simplification")
    p.add_argument("--broad", action="store_true", help="broad replacement in rules with an unused argument")

    p = sub.add_parser("classify", parents=[common], help="least hierarchy class")
    p.add_argument("formula", nargs="?")

    p = sub.add_parser("check", parents=[common], help="test the normal-form conditions")
    p.add_argument("formula", nargs="?")
    p.add_argument("--dual", action="store_true", help="check the dual normal form")

    p = sub.add_parser("equiv", parents=[common], help="bounded equivalence on lasso words")
    p.add_argument("formulas", nargs="*", metavar="FORMULA")
    p.add_argument("--prefix", type=_nonneg, default=3)
    p.add_argument("--loop", type=_positive, default=3)
    p.add_argument("--samples", type=_positive, default=None, help="check N sampled words instead of all")
    p.add_argument("--seed", type=int, default=0)

    for name, what in (("gen", "print generated formulas"), ("bench", "benchmark the normalizer")):
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument("--family", default=None,
                       help="wu-star:N, wu-star:A..B, wu-nested:N, wu-nested:A..B or random")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--size", type=_positive, default=25)
        p.add_argument("--atoms", type=_positive, default=4)
        p.add_argument("--count", type=_positive, default=100)
        if name == "bench":
            p.add_argument("--verify", type=_bounds, default=None, metavar="P,L",
                           help="oracle-check every output with these lasso bounds")
            p.add_argument("--samples", type=_positive, default=500,
                           help="sampled words per verification")
            p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                           help="seconds per formula")
            p.add_argument("--timing", action="store_true", help="print wall-clock times")
            p.add_argument("--dual", action="store_true")
            p.add_argument("--no-simplify", action="store_true")
            p.add_argument("--broad", action="store_true")
    return parser


# -- input helpers -----------------------------------------------------------------


def _formula_lines(path: str) -> List[str]:
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh]
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    return [ln for ln in lines if ln and not ln.startswith("#")]


def _inputs(args) -> List[str]:
    if args.file is not None and args.formula is not None:
        raise UsageError("give either a formula or --file, not both")
    if args.file is not None:
        return _formula_lines(args.file)
    if args.formula is None:
        raise UsageError("missing formula (or --file)")
    return [args.formula]


def _family(args) -> List[Formula]:
    spec = args.family
    if spec is None:
        raise UsageError("--family is required")
    if spec == "random":
        return random_corpus(args.seed, args.size, args.atoms, args.count)
    m = re.fullmatch(r"(wu-star|wu-nested):(\d+)(?:\.\.(\d+))?", spec)
    if not m:
        raise UsageError(f"invalid family {spec!r}")
    lo = int(m.group(2))
    hi = int(m.group(3)) if m.group(3) is not None else lo
    if hi < lo:
        raise UsageError(f"empty range in {spec!r}")
    build = family_wu_star if m.group(1) == "wu-star" else family_wu_nested
    try:
        for n in (lo, hi):
            GeneratorSpec(m.group(1), n=n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return [build(n) for n in range(lo, hi + 1)]


def _opts(args) -> NormalizeOptions:
    return NormalizeOptions(
        dual=args.dual, broad_replacement=args.broad, simplify=not args.no_simplify,
        stage_limit=getattr(args, "stage", 3),
    )


# -- commands ------------------------------------------------------------------------


def cmd_normalize(args, out) -> int:
    opts = _opts(args)
    for text in _inputs(args):
        f = parse(text)
        g, trace = normalize(f, opts)
        print(render(g), file=out)
        if args.trace and not args.quiet:
            for step in trace:
                print(f"  {step}", file=out)
        if args.stats and not args.quiet:
            print(f"nodes {f.size} -> {g.size}, rules {len(trace)}", file=sys.stderr)
    return EXIT_OK


def cmd_classify(args, out) -> int:
    for text in _inputs(args):
        print(classify(parse(text)), file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    status = EXIT_OK
    check = is_dual_normal_form if args.dual else is_normal_form
    for text in _inputs(args):
        verdict = check(parse(text))
        if not verdict:
            status = EXIT_FALSE
        if not args.quiet:
            print(verdict, file=out)
    return status


def cmd_equiv(args, out) -> int:
    if args.file is not None:
        if args.formulas:
            raise UsageError("give either two formulas or --file, not both")
        pairs = []
        for line in _formula_lines(args.file):
            parts = line.split(";")
            if len(parts) != 2:
                raise UsageError(f"expected 'F1 ; F2' per line, got {line!r}")
            pairs.append((parts[0].strip(), parts[1].strip()))
    elif len(args.formulas) == 2:
        pairs = [tuple(args.formulas)]
    else:
        raise UsageError("equiv needs exactly two formulas")
    status = EXIT_OK
    for left, right in pairs:
        f, g = parse(left), parse(right)
        try:
            verdict = bounded_equiv(f, g, args.prefix, args.loop, samples=args.samples, seed=args.seed)
        except BoundTooLarge as exc:
            raise UsageError(f"{exc}; use --samples") from exc
        if not verdict:
            status = EXIT_FALSE
        if not args.quiet:
            print(verdict, file=out)
    return status


def cmd_gen(args, out) -> int:
    if args.file is not None:
        raise UsageError("gen does not read formulas")
    for f in _family(args):
        print(render(f), file=out)
    return EXIT_OK


def cmd_bench(args, out) -> int:
    if args.file is not None:
        if args.family is not None:
            raise UsageError("give either --family or --file, not both")
        try:
            corpus = load_corpus(args.file)
        except OSError as exc:
            raise UsageError(f"cannot read {args.file}: {exc.strerror}") from exc
    else:
        corpus = list(enumerate(_family(args), start=1))
    if not corpus:
        raise UsageError("empty corpus")
    check = None
    if args.verify is not None:
        check = EquivCheck(args.verify[0], args.verify[1], samples=args.samples, seed=args.seed)
    records, summary = run_benchmark(corpus, _opts(args), check, timeout=args.timeout)
    if not args.quiet:
        for r in records:
            print(format_record(r, timing=args.timing), file=out)
    print(format_summary(summary, timing=args.timing), file=out)
    return EXIT_OK


COMMANDS = {
    "normalize": cmd_normalize, "classify": cmd_classify, "check": cmd_check,
    "equiv": cmd_equiv, "gen": cmd_gen, "bench": cmd_bench,
}


def main(argv: Optional[Iterable[str]] = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(None if argv is None else list(argv))
    except SystemExit as exc:  # argparse reports usage errors itself
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except ParseError as exc:
        print(f"parse error: {exc.message} at position {exc.position}", file=sys.stderr)
        print(exc.caret(), file=sys.stderr)
        return EXIT_USAGE
    except CorpusError as exc:
        print(f"parse error: line {exc.line}: {exc.error.message}", file=sys.stderr)
        print(exc.error.caret(), file=sys.stderr)
        return EXIT_USAGE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def entry() -> None:
    sys.exit(main())
