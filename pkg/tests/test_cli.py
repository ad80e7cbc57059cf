"""Command-line behaviour: outputs and the exit-code table (0 ok, 1
failed check or violation, 2 violation over a reduced ring, 64 usage,
65 parse) over a small corpus of input files."""

import subprocess
import sys

import pytest

from chaintrace import cli
from chaintrace.complexes import ChainMap
from chaintrace.linalg import Matrix
from chaintrace.rings import RingSpec
from chaintrace.search import SearchOutcome, build_counterexample
from chaintrace.ses import EndoTriple, check_triple
from chaintrace.textio import complex_file, ses_file

Z3E = RingSpec(3, True)


@pytest.fixture
def corpus(tmp_path):
    """A directory of input files covering the interesting shapes."""
    ses, triple, _ = build_counterexample(Z3E)
    write = lambda name, text: (tmp_path / name).write_text(text)

    write("triple.txt", ses_file(ses, triple=triple))
    write("ses.txt", ses_file(ses))

    zero = EndoTriple(ChainMap.zero(ses.sub, ses.sub),
                      ChainMap.zero(ses.middle, ses.middle),
                      ChainMap.zero(ses.quotient, ses.quotient))
    write("zero-triple.txt", ses_file(ses, triple=zero))

    L = ses.middle
    e = Z3E.epsilon()
    p = ChainMap.build(L, L, {0: Matrix.from_rows(Z3E, [[e]]),
                              1: Matrix.from_rows(Z3E, [[e]])})
    write("endos.txt", complex_file(L, "L", {
        "p": p, "z": ChainMap.zero(L, L), "v": triple.on_middle}))

    write("bad-complex.txt",
          "ring Z/4\ncomplex K\n  degrees 0..2\n  ranks 1 1 1\n"
          "  d 0 [[1]]\n  d 1 [[1]]\n")
    write("broken.txt", "ring Z/4\ncomplex K\n  ranks 1\n")
    write("not-exact.txt", "\n".join([
        "ring Z/4",
        "complex K\n  degrees 0..0\n  ranks 1",
        "complex L\n  degrees 0..0\n  ranks 1",
        "complex M\n  degrees 0..0\n  ranks 1",
        "map j 0 [[0]]",
        "map q 0 [[1]]",
    ]) + "\n")
    return tmp_path


def run(corpus, *argv):
    return cli.run([str(corpus / a) if a.endswith(".txt") else a
                    for a in argv])


EXIT_TABLE = [
    (("validate", "triple.txt"), 0),
    (("validate", "endos.txt"), 0),
    (("validate", "bad-complex.txt"), 1),
    (("validate", "broken.txt"), 65),
    (("validate", "no-such-file.txt"), 64),
    (("ses-check", "ses.txt"), 0),
    (("ses-check", "not-exact.txt"), 1),
    (("ses-check", "endos.txt"), 1),       # no sequence in the file
    (("trace", "triple.txt", "--endo", "v"), 0),
    (("trace", "triple.txt", "--endo", "nope"), 64),
    (("homotopy", "endos.txt", "--from", "p", "--to", "z"), 0),
    (("homotopy", "endos.txt", "--from", "v", "--to", "z"), 1),
    (("additivity", "triple.txt"), 1),     # the violation is real
    (("additivity", "zero-triple.txt"), 0),
    (("additivity", "ses.txt"), 1),        # endos missing
    (("counterexample", "--ring", "Z/3[e]"), 0),
    (("counterexample", "--ring", "Z/5"), 1),
    (("counterexample", "--ring", "Z/one"), 65),
    (("search", "--ring", "Z/2", "--mode", "exhaustive"), 0),
    (("search", "--ring", "Z/5", "--trials", "200"), 0),
    (("search", "--ring", "Z/4", "--trials", "2500"), 1),
    (("search", "--ring", "Z/4", "--mode", "exhaustive",
      "--ceiling", "50"), 64),
    (("search", "--ring", "Z/4", "--trials", "-3"), 64),
    (("bridge", "--ring", "Z/7", "--matrix", "[[1,2],[3,4]]"), 0),
    (("bridge", "--ring", "Z/3[e]", "--matrix", "[[1]]"), 64),
    (("bridge", "--ring", "Z/7", "--matrix", "[[1,2]]"), 64),
    (("bridge", "--ring", "Z/7", "--matrix", "[[x]]"), 65),
    (("wibble",), 64),
    ((), 64),
]


def test_exit_code_table(corpus, capsys):
    for argv, expected in EXIT_TABLE:
        code = run(corpus, *argv)
        capsys.readouterr()          # keep the log clean between cases
        assert code == expected, argv


def test_trace_output(corpus, capsys):
    assert run(corpus, "trace", "triple.txt", "--endo", "u") == 0
    assert capsys.readouterr().out == "0\n"
    assert run(corpus, "trace", "triple.txt", "--endo", "v") == 0
    assert capsys.readouterr().out == "2*e\n"


def test_counterexample_report(capsys):
    assert cli.run(["counterexample", "--ring", "Z/3[e]"]) == 0
    out = capsys.readouterr().out
    assert "defect = 2*e" in out
    assert "Tr(u) = 0" in out and "Tr(w) = 0" in out
    assert "Tr(v) = 2*e" in out
    assert "right square: strict" in out
    assert "left square: homotopy" in out
    assert "connecting square: strict" in out
    assert "independently certified: yes" in out

    assert cli.run(["counterexample", "--ring", "Z/4"]) == 0
    assert "defect = 2" in capsys.readouterr().out

    assert cli.run(["counterexample", "--ring", "Z/2[e]"]) == 0
    assert "defect = e" in capsys.readouterr().out


def test_additivity_report(corpus, capsys):
    assert run(corpus, "additivity", "triple.txt") == 1
    out = capsys.readouterr().out
    for needle in ("left square: homotopy", "right square: strict",
                   "connecting square: strict", "defect = 2*e",
                   "violation: yes"):
        assert needle in out


def test_homotopy_prints_witness(corpus, capsys):
    assert run(corpus, "homotopy", "endos.txt", "--from", "p",
               "--to", "z") == 0
    out = capsys.readouterr().out
    assert "homotopic: yes" in out and "h 1 [[1]]" in out
    assert run(corpus, "homotopy", "endos.txt", "--from", "v",
               "--to", "z") == 1
    assert capsys.readouterr().out == "none\n"


def test_search_report_and_log(tmp_path, capsys):
    log = tmp_path / "trail.tsv"
    code = cli.run(["search", "--ring", "Z/4", "--trials", "2500",
                    "--seed", "0", "--log", str(log)])
    out = capsys.readouterr().out
    assert code == 1
    assert "violations: 13" in out
    assert "instances examined: 849" in out
    assert "certified: yes" in out
    lines = log.read_text().splitlines()
    assert len(lines) == 2500
    index, squares, defect = lines[0].split("\t")
    assert index == "0" and len(squares.split("+")) == 3


def test_search_clean_report(capsys):
    assert cli.run(["search", "--ring", "Z/2", "--mode", "exhaustive"]) == 0
    out = capsys.readouterr().out
    assert "instances examined: 637" in out
    assert "violations: 0" in out
    assert "no violations at these bounds" in out


def test_search_reduced_ring_violation_exits_two(monkeypatch, capsys):
    # unreachable through a real sweep (that is the point of the theory),
    # so force the branch: a genuine violating instance re-labelled as
    # having been found over its own ring would certify, but a reduced
    # ring cannot produce one -- fake the search result to check the exit.
    ses, triple, _ = build_counterexample(RingSpec(4))
    outcome = SearchOutcome(1, (ses, triple, check_triple(ses, triple)), 7)
    monkeypatch.setattr(cli, "search_violation", lambda cfg, log=None: outcome)
    monkeypatch.setattr(RingSpec, "is_reduced", lambda self: True)
    code = cli.run(["search", "--ring", "Z/4", "--trials", "1"])
    out = capsys.readouterr().out
    assert code == 2
    assert "should be impossible" in out


def test_module_entry_point(corpus):
    proc = subprocess.run(
        [sys.executable, "-m", "chaintrace", "counterexample",
         "--ring", "Z/3[e]"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert "defect = 2*e" in proc.stdout
    proc = subprocess.run(
        [sys.executable, "-m", "chaintrace", "trace",
         str(corpus / "triple.txt"), "--endo", "u"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "0\n"


def test_usage_errors_go_to_stderr(corpus, capsys):
    assert run(corpus, "trace", "triple.txt", "--endo", "nope") == 64
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "no endo named 'nope'" in captured.err
