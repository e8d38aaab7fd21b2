import io
import subprocess
import sys

import pytest

from ltlnorm import parse
from ltlnorm.analysis import is_normal_form
from ltlnorm.cli import main
from ltlnorm.oracle import bounded_equiv


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


# -- normalize ---------------------------------------------------------------------


def test_normalize_with_trace():
    code, out = run("normalize", "((a0 U a1) W a2) U a3", "--trace")
    assert code == 0
    first, *steps = out.splitlines()
    assert len(steps) == 2
    assert steps[0].strip().startswith("stage 1 UW:")
    assert steps[1].strip().startswith("stage 2 GF1:")
    assert is_normal_form(parse(first))
    assert bounded_equiv(parse(first), parse("((a0 U a1) W a2) U a3"), 2, 2)


def test_normalize_simple():
    assert run("normalize", "a U b") == (0, "a U b\n")


def test_normalize_parse_error(capsys):
    code, out = run("normalize", "a W (")
    assert code == 2 and out == ""
    err = capsys.readouterr().err
    assert "position 5" in err and err.splitlines()[-1] == "     ^"


def test_normalize_options(capsys):
    assert run("normalize", "(a0 U a1) W a2", "--stage", "1", "--no-simplify")[1] == \
        "G F a1 & (a0 W a1) W a2 | (a0 U a1) U (a2 | G false)\n"
    code, out = run("normalize", "a U (b W c)", "--dual")
    assert code == 0
    assert bounded_equiv(parse(out.strip()), parse("a U (b W c)"), 2, 2)
    code, out = run("normalize", "G F (a W b)", "--stats")
    assert capsys.readouterr().err == "nodes 4 -> 7, rules 1\n"
    assert run("normalize", "(a U b) W c", "--broad")[0] == 0


def test_normalize_from_file(tmp_path):
    path = tmp_path / "in.txt"
    path.write_text("a U b\n# comment\n\nG F (a W b)\n")
    code, out = run("normalize", "--file", str(path))
    assert code == 0 and out == "a U b\nG F (a U b) | F G a\n"
    assert run("--file", str(path), "normalize") == (code, out)
    assert run("normalize", "a", "--file", str(path))[0] == 2
    assert run("normalize")[0] == 2
    assert run("normalize", "--file", str(tmp_path / "missing.txt"))[0] == 2


# -- classify / check -----------------------------------------------------------------


@pytest.mark.parametrize("text, label", [
    ("a", "Delta 0"),
    ("((a0 U a1) W a2) U a3", "Sigma 3"),
    ("F G F a", "Sigma 3"),
])
def test_classify(text, label):
    assert run("classify", text) == (0, label + "\n")


def test_check():
    assert run("check", "GF a | (b U c)") == (0, "normal form\n")
    code, out = run("check", "a W (b U c)")
    assert code == 1 and out.startswith("condition 1 violated at .right")
    code, out = run("check", "G F (a W b)")
    assert code == 1 and out.startswith("condition 3 violated")
    assert run("check", "a W (b U c)", "--quiet") == (1, "")
    assert run("check", "a W (b U c)", "--dual")[0] == 0


# -- equiv --------------------------------------------------------------------------------


def test_equiv():
    code, out = run("equiv", "a W b", "(a U b) | G a", "--prefix", "3", "--loop", "3")
    assert code == 0 and out.startswith("equivalent up to bound")
    assert run("equiv", "a U b", "a W b", "--prefix", "1", "--loop", "1") == \
        (1, "counterexample: ({a})^w\n")
    assert run("equiv", "a", "a", "--prefix", "0", "--loop", "1")[0] == 0
    code, out = run("equiv", "a U b", "a W b", "--prefix", "1", "--loop", "1",
                    "--samples", "200", "--seed", "3")
    assert code == 1


def test_equiv_usage_errors(tmp_path):
    assert run("equiv", "a")[0] == 2
    assert run("equiv", "a", "b", "--loop", "0")[0] == 2
    assert run("equiv", "a0 & a1 & a2 & a3", "a0", "--prefix", "3", "--loop", "3")[0] == 2
    path = tmp_path / "pairs.txt"
    path.write_text("a W b ; (a U b) | G a\na ; a\n")
    code, out = run("equiv", "--file", str(path))
    assert code == 0 and len(out.splitlines()) == 2
    path.write_text("a W b ; a U b\n")
    assert run("equiv", "--file", str(path))[0] == 1
    path.write_text("a W b\n")
    assert run("equiv", "--file", str(path))[0] == 2


# -- gen / bench ---------------------------------------------------------------------------


def test_gen():
    assert run("gen", "--family", "wu-star:3") == (0, "((a0 U a1) W a2) U a3\n")
    assert run("gen", "--family", "wu-star:1")[0] == 2
    assert run("gen", "--family", "wu-nested:0..2")[1].splitlines() == [
        "a0", "(a0 U a1) W a2", "(((a0 U a1) W a2) U a3) W a4",
    ]
    code, out = run("gen", "--family", "random", "--seed", "2", "--count", "5", "--size", "12")
    assert code == 0 and len(out.splitlines()) == 5
    assert run("gen", "--family", "zigzag:3")[0] == 2
    assert run("gen")[0] == 2
    assert run("gen", "--family", "wu-star:5..3")[0] == 2


def test_bench():
    code, out = run("bench", "--family", "wu-nested:6", "--verify", "2,2")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("id:1 in_nodes:25 in_dag:25 out_nodes:")
    assert lines[-1].startswith("summary formulas:1 completed:1 timeouts:0 ")
    code, out = run("bench", "--family", "wu-star:2..10", "--quiet")
    assert code == 0 and len(out.splitlines()) == 1
    code, out = run("bench", "--family", "wu-star:3", "--timing")
    assert "ms:-" not in out


def test_bench_file_and_errors(tmp_path, capsys):
    path = tmp_path / "corpus.txt"
    path.write_text("a U b\n(a U b) W c\n")
    code, out = run("bench", "--file", str(path))
    assert code == 0 and out.splitlines()[1].startswith("id:2 ")
    path.write_text("a U\n")
    assert run("bench", "--file", str(path))[0] == 2
    assert "line 1" in capsys.readouterr().err
    path.write_text("# nothing\n")
    assert run("bench", "--file", str(path))[0] == 2
    assert run("bench", "--family", "wu-star:3", "--verify", "2")[0] == 2
    assert run("bench", "--family", "wu-star:3", "--file", str(path))[0] == 2


def test_verification_failure_exit_code(monkeypatch):
    import ltlnorm.bench as bench

    real = bench.normalize
    monkeypatch.setattr(bench, "normalize", lambda f, opts: (parse("false"), real(f, opts)[1]))
    assert run("bench", "--family", "wu-star:3", "--verify", "1,1")[0] == 3


def test_unknown_flag_and_command():
    assert run("normalize", "a", "--frobnicate")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("--help")[0] == 0


def test_output_is_byte_identical_across_processes():
    argv = [sys.executable, "-m", "ltlnorm", "bench", "--family", "random", "--seed", "5", "--count", "20"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and first.count(b"\n") == 21


def test_normalize_output_passes_check():
    code, out = run("gen", "--family", "random", "--seed", "11", "--count", "25")
    for text in out.splitlines():
        _, normal = run("normalize", text)
        assert run("check", normal.strip())[0] == 0
