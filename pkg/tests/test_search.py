"""Tests for the violation search: the minimal violating instance, the
exhaustive and randomized sweeps, and the independent certifier.

The pinned counts (examined/violation totals for fixed bounds and seeds)
were frozen from runs that were cross-checked two ways: the bucketed
fast sweep against the one-triple-at-a-time logged sweep, and search
hits against `certify`.  They guard the enumeration and the histogram
bookkeeping against silent drift.
"""

import pytest

from chaintrace.complexes import ChainMap, PerfectComplex
from chaintrace.homotopy import graded_trace, perturb
from chaintrace.linalg import Matrix
from chaintrace.rings import RingSpec
from chaintrace.search import (
    CeilingExceededError,
    SearchConfig,
    SearchOutcome,
    _SesTally,
    build_counterexample,
    certify,
    iter_all_complexes,
    search_violation,
    wrap_instance,
)
from chaintrace.ses import (
    EndoTriple,
    check_triple,
    make_extension,
    validate_ses,
)

Z2 = RingSpec(2)
Z3 = RingSpec(3)
Z4 = RingSpec(4)
Z2E = RingSpec(2, True)
Z3E = RingSpec(3, True)


def M(ring, rows):
    return Matrix.from_rows(ring, rows)


# ---------------------------------------------------------------------------
# the minimal violating instance
# ---------------------------------------------------------------------------


def test_counterexample_values_over_square_zero_rings():
    for ring in (Z3E, Z2E, Z4):
        ses, triple, witness = build_counterexample(ring)
        x = ring.nilpotent_witness()
        assert validate_ses(ses)
        assert graded_trace(triple.on_sub) == ring.zero()
        assert graded_trace(triple.on_quotient) == ring.zero()
        assert graded_trace(triple.on_middle) == -x
        report = check_triple(ses, triple)
        assert report.right.strict
        assert not report.left.strict and report.left.holds
        assert report.defect == -x
        assert report.is_violation
        # the packaged homotopy really witnesses the left square
        left_diff = (triple.on_middle @ ses.inclusion
                     - ses.inclusion @ triple.on_sub)
        assert perturb(ChainMap.zero(ses.sub, ses.middle), witness) == left_diff
        assert witness.comp(1) == Matrix.identity(ring, 1)


def test_counterexample_needs_a_square_zero_element():
    for m in (2, 3, 5, 6, 7, 10):
        with pytest.raises(ValueError):
            build_counterexample(RingSpec(m))


def test_wrapped_counterexample_certifies():
    ses, triple, _ = build_counterexample(Z3E)
    out = wrap_instance(ses, triple)
    assert out.violations_found == 1 and out.instances_examined == 1
    assert bool(certify(out))


def test_wrap_instance_discards_incomplete_triangles():
    # two visible squares hold, the connecting one fails: not examined
    sub = PerfectComplex.build(Z2, 0, [1, 1])
    quo = PerfectComplex.single(Z2, 0, 1)
    ses = make_extension(sub, quo, {0: M(Z2, [[1]])})
    triple = EndoTriple(ChainMap.zero(sub, sub),
                        ChainMap.zero(ses.middle, ses.middle),
                        ChainMap.identity(quo))
    assert check_triple(ses, triple).is_violation
    out = wrap_instance(ses, triple)
    assert out == SearchOutcome(0, None, 0)


# ---------------------------------------------------------------------------
# the certifier
# ---------------------------------------------------------------------------


def test_certify_rejects_zero_defect():
    ses, triple, _ = build_counterexample(Z2E)
    zero = EndoTriple(ChainMap.zero(ses.sub, ses.sub),
                      ChainMap.zero(ses.middle, ses.middle),
                      ChainMap.zero(ses.quotient, ses.quotient))
    forged = SearchOutcome(1, (ses, zero, check_triple(ses, zero)), 1)
    verdict = certify(forged)
    assert not verdict and verdict.kind == "defect"


def test_certify_rejects_failing_connecting_square():
    sub = PerfectComplex.build(Z2, 0, [1, 1])
    quo = PerfectComplex.single(Z2, 0, 1)
    ses = make_extension(sub, quo, {0: M(Z2, [[1]])})
    triple = EndoTriple(ChainMap.zero(sub, sub),
                        ChainMap.zero(ses.middle, ses.middle),
                        ChainMap.identity(quo))
    forged = SearchOutcome(1, (ses, triple, check_triple(ses, triple)), 1)
    verdict = certify(forged)
    assert not verdict and verdict.kind == "square"


def test_certify_rejects_tampered_report():
    import dataclasses

    ses, triple, _ = build_counterexample(Z4)
    honest = check_triple(ses, triple)
    tampered = SearchOutcome(
        1, (ses, triple, dataclasses.replace(honest, defect=Z4.element(1))), 1)
    verdict = certify(tampered)
    assert not verdict and verdict.kind == "mismatch"


def test_certify_requires_a_violation():
    ses, _, _ = build_counterexample(Z3E)
    zero = EndoTriple(ChainMap.zero(ses.sub, ses.sub),
                      ChainMap.zero(ses.middle, ses.middle),
                      ChainMap.zero(ses.quotient, ses.quotient))
    with pytest.raises(ValueError):
        certify(wrap_instance(ses, zero))


# ---------------------------------------------------------------------------
# complex enumeration
# ---------------------------------------------------------------------------


def test_iter_all_complexes_census():
    small = list(iter_all_complexes(Z2, max_window=2, max_rank=1))
    assert len(small) == len(set(small)) == 4
    for k in small:
        assert k.validate()
        assert k.lo == 0
    wider = list(iter_all_complexes(Z3, max_window=3, max_rank=1))
    assert len(wider) == len(set(wider)) == 11
    for k in wider:
        assert k.validate()


# ---------------------------------------------------------------------------
# exhaustive search
# ---------------------------------------------------------------------------


def test_exhaustive_over_prime_field_finds_nothing():
    cfg = SearchConfig(Z2, max_window=2, max_rank=1, mode="exhaustive")
    out = search_violation(cfg)
    # pinned: the enumeration is deterministic, so these are regressions
    assert out.instances_examined == 637
    assert out.violations_found == 0
    assert out.first_violation is None


def test_exhaustive_fast_and_logged_sweeps_agree():
    cfg = SearchConfig(Z2, max_window=2, max_rank=1, mode="exhaustive")
    fast = search_violation(cfg)
    lines = []
    slow = search_violation(cfg, log=lines.append)
    assert fast == slow
    assert len(lines) == 6545     # every classified triple, violating or not
    for line in lines[:50]:
        index, squares, defect = line.split("\t")
        assert index.isdigit()
        parts = squares.split("+")
        assert len(parts) == 3
        assert all(p in ("strict", "homotopy", "none") for p in parts)
        assert defect in ("0", "1")
    assert lines[0] == "0\tstrict+strict+strict\t0"


def test_histogram_sweep_matches_slow_sweep_on_violating_sequence():
    sub = PerfectComplex.build(Z4, 0, [1, 1])
    quo = PerfectComplex.single(Z4, 0, 1)
    ses = make_extension(sub, quo, {0: M(Z4, [[2]])})
    tally = _SesTally(ses)
    fast_ex, fast_vi, fast_first = tally.sweep()
    lines = []
    slow_ex, slow_vi, slow_first, _ = tally.sweep_logged(0, lines.append)
    assert (fast_ex, fast_vi) == (slow_ex, slow_vi) == (512, 256)
    assert fast_first is not None and slow_first is not None
    assert bool(certify(SearchOutcome(fast_vi, fast_first, fast_ex)))
    assert bool(certify(SearchOutcome(slow_vi, slow_first, slow_ex)))


def test_exhaustive_ceiling_blocks_oversized_runs():
    tight = SearchConfig(Z4, max_window=2, max_rank=1, mode="exhaustive",
                         ceiling=1000)
    with pytest.raises(CeilingExceededError):
        search_violation(tight)
    # and the logged sweep budgets per triple, which is far larger
    default = SearchConfig(Z4, max_window=2, max_rank=1, mode="exhaustive")
    with pytest.raises(CeilingExceededError):
        search_violation(default, log=lambda line: None)


# ---------------------------------------------------------------------------
# randomized search
# ---------------------------------------------------------------------------


def test_randomized_is_deterministic_and_log_free():
    cfg = SearchConfig(RingSpec(6), trials=200, seed=11)
    first = search_violation(cfg)
    lines = []
    second = search_violation(cfg, log=lines.append)
    assert first == second
    assert first.violations_found == 0
    assert len(lines) == 200


def test_randomized_over_square_zero_ring_finds_certified_violation():
    cfg = SearchConfig(Z4, trials=2500, seed=0)
    out = search_violation(cfg)
    # pinned: per-trial reseeding makes the whole run reproducible
    assert out.violations_found == 13
    assert out.instances_examined == 849
    assert bool(certify(out))


def test_randomized_over_field_examines_but_never_finds():
    cfg = SearchConfig(RingSpec(5), trials=400, seed=0)
    out = search_violation(cfg)
    assert out.violations_found == 0
    assert out.instances_examined > 0


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(Z4, mode="clever")
    with pytest.raises(ValueError):
        SearchConfig(Z4, max_window=0)
    with pytest.raises(ValueError):
        SearchConfig(Z4, ceiling=0)
