"""Hunting for failures of trace additivity over short exact sequences.

Over a base ring with a square-zero element the additivity of graded
traces breaks once the compatibility squares are only required to
commute up to homotopy; over a reduced base the homotopy-commuting
triples stay additive, and no amount of desk-scale searching turns up a
violation.  This module provides both sides of that experiment:

  * build_counterexample — the minimal violating instance, available
    over any ring that has a square-zero element;
  * search_violation — exhaustive or seeded-random sweeps over
    extensions and endomorphism triples, counting examined triples with
    nonzero trace defect;
  * certify — an independent from-scratch re-check of a reported
    violation, so a search hit is never taken on the search's word.

What counts: a triple is *examined* when all three of its squares
commute at least up to homotopy — the two visible ones (through the
inclusion and the projection) and the connecting square, which pits the
sub endo against the quotient endo across the sequence's boundary map.
The third square cannot be dropped: already over a field there are
triples whose two visible squares commute up to homotopy while the
traces refuse to add, because nothing ties the outer endos together.
Requiring the boundary square as well makes additivity a theorem over
reduced rings (the outer endos then lift to a strictly commuting,
block-triangular middle endo, and the leftover middle discrepancy is
square-zero on cohomology, hence traceless over a field) — while the
classic square-zero-twist instance still sails through all three
squares with a nonzero defect.  That asymmetry is the whole point.

Exhaustive mode enumerates complexes (windows anchored at degree 0 —
traces are blind to shifts), twists, and endomorphism triples.  Triples
are never looped over one by one on the happy path: endos of the sub
and quotient are bucketed by the coset keys of their visible square's
defect and of their half of the connecting square, so every (u, w) pair
compatible with a given middle endo is counted by histogram convolution
instead of being visited.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from random import Random
from typing import Callable, Iterator, Optional

from .complexes import (
    ChainMap,
    ChainMapSpace,
    Homotopy,
    PerfectComplex,
    Validation,
    _VALID,
)
from .generate import random_cocycle, random_complex
from .homotopy import NullHomotopyProblem, graded_trace
from .linalg import LinearSolver, Matrix
from .rings import RingElem, RingSpec
from .ses import (
    AdditivityReport,
    CocycleSpace,
    EndoTriple,
    ShortExactSequence,
    SquareStatus,
    check_triple,
    connecting_map,
    connecting_square,
    make_extension,
    validate_ses,
)

DEFAULT_CEILING = 10_000_000

Violation = tuple[ShortExactSequence, EndoTriple, AdditivityReport]
LogLine = Callable[[str], None]


class CeilingExceededError(RuntimeError):
    """Exhaustive enumeration would touch more objects than allowed."""


@dataclass(frozen=True)
class SearchConfig:
    """Bounds and determinism knobs for one search run.

    `max_window` bounds how many consecutive degrees a generated complex
    may occupy, `max_rank` the rank in each degree.  `trials` and `seed`
    drive randomized mode (each trial reseeds as f"{seed}:{trial}", so
    outcomes do not depend on scheduling); `ceiling` bounds the number
    of objects exhaustive mode may enumerate, measured upfront.
    """

    ring: RingSpec
    max_window: int = 2
    max_rank: int = 1
    trials: int = 10_000
    seed: int | str = 0
    mode: str = "randomized"
    ceiling: int = DEFAULT_CEILING

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "randomized"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.max_window < 1:
            raise ValueError("max_window must be at least 1")
        if self.max_rank < 0 or self.trials < 0 or self.ceiling < 1:
            raise ValueError("bounds must be non-negative (ceiling positive)")


@dataclass(frozen=True)
class SearchOutcome:
    """What a search saw: examined = triples with all three squares
    (left, right, connecting) commuting at least up to homotopy."""

    violations_found: int
    first_violation: Optional[Violation]
    instances_examined: int


# ---------------------------------------------------------------------------
# The minimal violating instance
# ---------------------------------------------------------------------------


def build_counterexample(
        ring: RingSpec) -> tuple[ShortExactSequence, EndoTriple, Homotopy]:
    """The smallest failure of trace additivity up to homotopy.

    Writing x for the ring's square-zero witness: the sub complex is one
    free rank in degree 1, the quotient one free rank in degree 0, glued
    by the twist [[x]] (so the middle is R --x--> R in degrees 0..1).
    The triple is u = 0 on the sub, w = 0 on the quotient, and v with
    v^0 = 0, v^1 = [[x]] on the middle.  The right square commutes
    strictly; the left one only up to the returned homotopy (h^1 = [[1]],
    the identity block); the connecting square is strict outright, both
    outer endos being zero.  The graded traces are 0, -x, 0, so the
    defect is -x, nonzero: additivity fails even though every square
    commutes up to homotopy.  Needs a square-zero element — over a
    reduced ring this instance cannot exist (ValueError).
    """
    x = ring.nilpotent_witness()
    if x is None:
        raise ValueError(f"{ring} is reduced: no square-zero element, so "
                         f"the violating instance cannot be built")
    sub = PerfectComplex.single(ring, 1, 1)
    quo = PerfectComplex.single(ring, 0, 1)
    ses = make_extension(sub, quo,
                         {0: Matrix.from_rows(ring, [[x]])})
    v = ChainMap.build(ses.middle, ses.middle,
                       {1: Matrix.from_rows(ring, [[x]])})
    triple = EndoTriple(ChainMap.zero(sub, sub), v,
                        ChainMap.zero(quo, quo))
    witness = Homotopy.build(sub, ses.middle,
                             {1: Matrix.identity(ring, 1)})
    return ses, triple, witness


def wrap_instance(ses: ShortExactSequence, triple: EndoTriple) -> SearchOutcome:
    """Classify one concrete instance exactly as the searches would.

    Examined when the two visible squares and the connecting square all
    commute at least up to homotopy; a violation when examined with
    nonzero defect.  Only an actual violation is stored, so the result
    feeds straight into certify.
    """
    report = check_triple(ses, triple)
    conn = connecting_square(ses, triple.on_sub, triple.on_quotient)
    examined = report.squares_hold and conn.holds
    violation = examined and not report.additive
    return SearchOutcome(1 if violation else 0,
                         (ses, triple, report) if violation else None,
                         1 if examined else 0)


# ---------------------------------------------------------------------------
# Exhaustive enumeration of complexes
# ---------------------------------------------------------------------------


def _rank_vectors(max_window: int, max_rank: int) -> Iterator[tuple[int, ...]]:
    yield (0,)
    for width in range(1, max_window + 1):
        for vec in itertools.product(range(max_rank + 1), repeat=width):
            # nonzero edge ranks, so each normalised complex shows up once
            if vec[0] and vec[-1]:
                yield vec


def iter_all_complexes(ring: RingSpec, *, max_window: int,
                       max_rank: int) -> Iterator[PerfectComplex]:
    """Every valid complex with window anchored at degree 0, each degree
    of rank at most max_rank, no duplicates (edge ranks nonzero)."""
    for ranks in _rank_vectors(max_window, max_rank):
        yield from _complexes_with_ranks(ring, ranks)


def _complexes_with_ranks(ring: RingSpec,
                          ranks: tuple[int, ...]) -> Iterator[PerfectComplex]:
    n = len(ranks)

    def extend(i: int, prev: Matrix, acc: dict[int, Matrix]
               ) -> Iterator[PerfectComplex]:
        if i == n - 1:
            yield PerfectComplex.build(ring, 0, ranks, dict(acc))
            return
        # rows of the next differential must pair to zero against the
        # columns of the previous one: sample the kernel of its transpose
        solver = LinearSolver(prev.transpose())
        zero_rhs = [ring.zero()] * prev.cols
        row_choices = list(solver.iter_solutions(zero_rhs))
        rows, cols = ranks[i + 1], ranks[i]
        for combo in itertools.product(row_choices, repeat=rows):
            d = Matrix(ring, rows, cols,
                       tuple(x for row in combo for x in row))
            acc[i] = d
            yield from extend(i + 1, d, acc)
        acc.pop(i, None)

    yield from extend(0, Matrix.zero(ring, ranks[0], 0), {})


# ---------------------------------------------------------------------------
# One short exact sequence, all triples, by histogram convolution
# ---------------------------------------------------------------------------


class _SesTally:
    """Per-sequence machinery: bucket sub endos by (left-square key,
    connecting key of u against the boundary map) and quotient endos by
    (right-square key, connecting key of the boundary map against w),
    then race middle endos through the buckets.  Two outer endos are
    jointly admissible for a given middle endo exactly when their square
    keys match the middle endo's and their connecting keys match each
    other, so nothing triple-shaped is ever materialised."""

    def __init__(self, ses: ShortExactSequence):
        self.ses = ses
        self.left_prob = NullHomotopyProblem(ses.sub, ses.middle)
        self.right_prob = NullHomotopyProblem(ses.middle, ses.quotient)
        self.delta = connecting_map(ses)
        self.conn_prob = NullHomotopyProblem(ses.quotient, ses.sub.shift(1))
        self.u_space = ChainMapSpace(ses.sub, ses.sub)
        self.w_space = ChainMapSpace(ses.quotient, ses.quotient)
        self.v_space = ChainMapSpace(ses.middle, ses.middle)
        j, q = ses.inclusion, ses.projection
        Key = tuple[int, ...]
        # hu[left key][connecting key][trace index] = how many sub endos
        self.hu: dict[Key, dict[Key, dict[int, int]]] = {}
        for u in self.u_space.iter_all():
            key = self.left_prob.coset_key(j @ u)
            ck = self.conn_prob.coset_key(u.shift(1) @ self.delta)
            t = graded_trace(u).index
            bucket = self.hu.setdefault(key, {}).setdefault(ck, {})
            bucket[t] = bucket.get(t, 0) + 1
        self.hw: dict[Key, dict[Key, dict[int, int]]] = {}
        for w in self.w_space.iter_all():
            key = self.right_prob.coset_key(w @ q)
            ck = self.conn_prob.coset_key(self.delta @ w)
            t = graded_trace(w).index
            bucket = self.hw.setdefault(key, {}).setdefault(ck, {})
            bucket[t] = bucket.get(t, 0) + 1
        self._nu = {k: {ck: sum(b.values()) for ck, b in sub.items()}
                    for k, sub in self.hu.items()}
        self._nw = {k: {ck: sum(b.values()) for ck, b in sub.items()}
                    for k, sub in self.hw.items()}

    def sweep(self) -> tuple[int, int, Optional[Violation]]:
        """(examined, violations, first violation or None) over all
        middle endos, using the histograms."""
        ses = self.ses
        ring = ses.ring
        j, q = ses.inclusion, ses.projection
        examined = violations = 0
        first: Optional[Violation] = None
        for v in self.v_space.iter_all():
            kl = self.left_prob.coset_key(v @ j)
            kr = self.right_prob.coset_key(q @ v)
            bu, bw = self.hu.get(kl), self.hw.get(kr)
            if not bu or not bw:
                continue
            tv = graded_trace(v)
            pairs = additive = 0
            for ck, bucket_u in bu.items():
                bucket_w = bw.get(ck)
                if not bucket_w:
                    continue
                pairs += self._nu[kl][ck] * self._nw[kr][ck]
                additive += sum(
                    cnt * bucket_w.get((tv - ring.from_index(t)).index, 0)
                    for t, cnt in bucket_u.items())
            examined += pairs
            bad = pairs - additive
            if bad:
                violations += bad
                if first is None:
                    first = self._locate(v, kl, kr, tv)
        return examined, violations, first

    def _locate(self, v: ChainMap, kl: tuple[int, ...],
                kr: tuple[int, ...], tv: RingElem) -> Violation:
        """First (u, w) in enumeration order completing v to a violating
        triple; only runs once per search, so plain scanning is fine."""
        ses = self.ses
        j, q = ses.inclusion, ses.projection
        for u in self.u_space.iter_all():
            if self.left_prob.coset_key(j @ u) != kl:
                continue
            cku = self.conn_prob.coset_key(u.shift(1) @ self.delta)
            tu = graded_trace(u)
            for w in self.w_space.iter_all():
                if self.right_prob.coset_key(w @ q) != kr:
                    continue
                if self.conn_prob.coset_key(self.delta @ w) != cku:
                    continue
                if tv - tu - graded_trace(w):
                    triple = EndoTriple(u, v, w)
                    report = check_triple(
                        ses, triple,
                        left_problem=self.left_prob,
                        right_problem=self.right_prob)
                    return ses, triple, report
        raise RuntimeError("histogram promised a violation but the scan "
                           "found none; counting bug")

    def sweep_logged(self, base_index: int, log: LogLine
                     ) -> tuple[int, int, Optional[Violation], int]:
        """Slow per-triple sweep that emits one log line per classified
        triple; order is middle endo, then sub endo, then quotient."""
        ses = self.ses
        j, q = ses.inclusion, ses.projection
        examined = violations = 0
        first: Optional[Violation] = None
        index = base_index
        for v in self.v_space.iter_all():
            tv = graded_trace(v)
            vj, qv = v @ j, q @ v
            for u in self.u_space.iter_all():
                left_diff = vj - j @ u
                left = SquareStatus(left_diff.is_zero(),
                                    self.left_prob.solve_for(left_diff))
                u_half = u.shift(1) @ self.delta
                for w in self.w_space.iter_all():
                    right_diff = qv - w @ q
                    right = SquareStatus(
                        right_diff.is_zero(),
                        self.right_prob.solve_for(right_diff))
                    conn_diff = u_half - self.delta @ w
                    conn = SquareStatus(conn_diff.is_zero(),
                                        self.conn_prob.solve_for(conn_diff))
                    defect = tv - graded_trace(u) - graded_trace(w)
                    log(f"{index}\t{left.describe()}+{right.describe()}"
                        f"+{conn.describe()}\t{defect}")
                    index += 1
                    if not (left.holds and right.holds and conn.holds):
                        continue
                    examined += 1
                    if defect:
                        violations += 1
                        if first is None:
                            report = AdditivityReport(
                                left, right, graded_trace(u), tv,
                                graded_trace(w), defect)
                            first = (ses, EndoTriple(u, v, w), report)
        return examined, violations, first, index


# ---------------------------------------------------------------------------
# The search drivers
# ---------------------------------------------------------------------------


def _bounded_complex_list(cfg: SearchConfig) -> list[PerfectComplex]:
    out: list[PerfectComplex] = []
    for k in iter_all_complexes(cfg.ring, max_window=cfg.max_window,
                                max_rank=cfg.max_rank):
        out.append(k)
        if len(out) > cfg.ceiling:
            raise CeilingExceededError(
                f"more than {cfg.ceiling} complexes in range; raise the "
                f"ceiling or shrink the bounds")
    return out


def _iter_extensions(cfg: SearchConfig
                     ) -> Iterator[tuple[ShortExactSequence, int, int, int]]:
    """All extensions in range, with endo-space sizes for budgeting."""
    all_cs = _bounded_complex_list(cfg)
    for sub in all_cs:
        for quo in all_cs:
            space = CocycleSpace(sub, quo)
            n_u = ChainMapSpace(sub, sub).count
            n_w = ChainMapSpace(quo, quo).count
            for twist in space.iter_all():
                ses = make_extension(sub, quo, twist)
                n_v = ChainMapSpace(ses.middle, ses.middle).count
                yield ses, n_u, n_w, n_v


def _exhaustive_budget(cfg: SearchConfig, *, per_triple: bool) -> int:
    """Total object count the exhaustive run will enumerate; raises
    CeilingExceededError as soon as the running total passes the
    ceiling, so oversized configs are refused before real work."""
    total = 0
    for _ses, n_u, n_w, n_v in _iter_extensions(cfg):
        total += 1 + (n_u * n_w * n_v if per_triple else n_u + n_w + n_v)
        if total > cfg.ceiling:
            raise CeilingExceededError(
                f"exhaustive enumeration needs more than "
                f"{cfg.ceiling} objects (at least {total}); raise the "
                f"ceiling or shrink the bounds")
    return total


def _search_exhaustive(cfg: SearchConfig,
                       log: Optional[LogLine]) -> SearchOutcome:
    # budget pass first: streams the same skeletons without doing work.
    # with a log, every triple is visited one by one, so the budget is
    # counted per triple; without one the histogram path only ever
    # enumerates the three endo spaces separately.
    _exhaustive_budget(cfg, per_triple=log is not None)
    examined = violations = 0
    first: Optional[Violation] = None
    index = 0
    for ses, _n_u, _n_w, _n_v in _iter_extensions(cfg):
        if not validate_ses(ses):     # impossible by construction
            continue
        tally = _SesTally(ses)
        if log is None:
            ex, vi, fi = tally.sweep()
        else:
            ex, vi, fi, index = tally.sweep_logged(index, log)
        examined += ex
        violations += vi
        if first is None:
            first = fi
    return SearchOutcome(violations, first, examined)


def _search_randomized(cfg: SearchConfig,
                       log: Optional[LogLine]) -> SearchOutcome:
    ring = cfg.ring
    examined = violations = 0
    first: Optional[Violation] = None
    for trial in range(cfg.trials):
        rng = Random(f"{cfg.seed}:{trial}")
        sub = random_complex(rng, ring, max_window=cfg.max_window,
                             max_rank=cfg.max_rank)
        quo = random_complex(rng, ring, max_window=cfg.max_window,
                             max_rank=cfg.max_rank)
        ses = make_extension(sub, quo, random_cocycle(rng, sub, quo))
        u = ChainMapSpace(sub, sub).sample(rng)
        v = ChainMapSpace(ses.middle, ses.middle).sample(rng)
        w = ChainMapSpace(quo, quo).sample(rng)
        left_prob = NullHomotopyProblem(sub, ses.middle)
        right_prob = NullHomotopyProblem(ses.middle, ses.quotient)
        j, q = ses.inclusion, ses.projection
        left_diff = v @ j - j @ u
        right_diff = q @ v - w @ q
        left = SquareStatus(left_diff.is_zero(),
                            left_prob.solve_for(left_diff))
        right = SquareStatus(right_diff.is_zero(),
                             right_prob.solve_for(right_diff))
        conn = connecting_square(ses, u, w)
        tu, tv, tw = graded_trace(u), graded_trace(v), graded_trace(w)
        defect = tv - tu - tw
        if log is not None:
            log(f"{trial}\t{left.describe()}+{right.describe()}"
                f"+{conn.describe()}\t{defect}")
        if not (left.holds and right.holds and conn.holds):
            continue             # a failing square: discarded, not examined
        examined += 1
        if defect:
            violations += 1
            if first is None:
                report = AdditivityReport(left, right, tu, tv, tw, defect)
                first = (ses, EndoTriple(u, v, w), report)
    return SearchOutcome(violations, first, examined)


def search_violation(cfg: SearchConfig,
                     log: Optional[LogLine] = None) -> SearchOutcome:
    """Sweep extensions and endomorphism triples, counting violations.

    A triple is *examined* when its left, right and connecting squares
    all commute at least up to homotopy (anything else is discarded
    unexamined); it is a *violation* when it is examined and its trace
    defect is nonzero.  Deterministic given the config, including across
    log settings — except that `log`, when given, receives one line per
    classified triple ("index<TAB>left+right+connecting<TAB>defect"),
    which in exhaustive mode forces the slow one-by-one sweep and a
    per-triple budget.
    """
    if cfg.mode == "exhaustive":
        return _search_exhaustive(cfg, log)
    return _search_randomized(cfg, log)


# ---------------------------------------------------------------------------
# Independent re-checking of search hits
# ---------------------------------------------------------------------------


def certify(outcome: SearchOutcome) -> Validation:
    """Re-derive everything a stored violation claims, from scratch.

    Runs validate_ses, re-validates the endos and both visible squares
    via a fresh check_triple (whose homotopy witnesses are re-evaluated
    against their defining equation), re-decides the connecting square,
    and confirms the defect is nonzero and matches the stored report.
    ValueError when the outcome carries no violation to certify.
    """
    if outcome.first_violation is None:
        raise ValueError("outcome holds no violation to certify")
    ses, triple, stored = outcome.first_violation
    v = validate_ses(ses)
    if not v:
        return Validation(False, "ses", v.degree,
                          f"sequence fails re-validation: {v.message}")
    try:
        fresh = check_triple(ses, triple)
    except ValueError as exc:
        return Validation(False, "endo", None, str(exc))
    if not fresh.squares_hold:
        return Validation(False, "square", None,
                          "a visible square does not commute up to homotopy")
    if not connecting_square(ses, triple.on_sub, triple.on_quotient).holds:
        return Validation(False, "square", None,
                          "the connecting square does not commute up to "
                          "homotopy")
    if not fresh.defect:
        return Validation(False, "defect", None,
                          "defect is zero: not a violation")
    if (fresh.defect != stored.defect
            or fresh.left.strict != stored.left.strict
            or fresh.right.strict != stored.right.strict):
        return Validation(False, "mismatch", None,
                          "stored report disagrees with recomputation")
    return _VALID
