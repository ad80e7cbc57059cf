"""Short exact sequences of complexes and trace additivity bookkeeping.

A short exact sequence here is a sub-complex, a middle complex and a
quotient complex joined by an inclusion and a projection that are exact
degree by degree.  Exactness is certified by counting: the inclusion must
have trivial kernel, the projection must be onto, and the image of the
inclusion must have exactly the size of the projection's kernel.  All of
those counts come from the shared SNF solver, so the verdicts are exact.

The other half of the module measures endomorphism triples (one endo per
complex) against such a sequence: do the two squares commute, strictly or
up to chain homotopy, and do the graded traces add up?  The failure of
the latter when the ring has nilpotents is the phenomenon the search
module hunts for; here we only measure a single given triple.

Besides the two visible squares there is a third, hidden one: the
sequence carries a boundary map from the quotient into the shifted sub
complex (for an extension in block form it is just the glueing twist),
and a triple can also be asked to commute with it up to homotopy.  That
extra square is exactly what separates genuine additivity failures from
bookkeeping artifacts — see `connecting_map` and `connecting_square`.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterator, Mapping, Optional, Sequence

from .complexes import (
    ChainMap,
    PerfectComplex,
    Validation,
    _VALID,
    _union_window,
)
from .homotopy import Homotopy, NullHomotopyProblem, graded_trace
from .linalg import LinearSolver, Matrix, image_count, kernel_count
from .rings import RingElem


@dataclass(frozen=True)
class ShortExactSequence:
    """sub >--inclusion--> middle --projection-->> quotient."""

    sub: PerfectComplex
    middle: PerfectComplex
    quotient: PerfectComplex
    inclusion: ChainMap
    projection: ChainMap

    @property
    def ring(self):
        return self.middle.ring

    def __str__(self) -> str:
        return (f"short exact sequence over {self.ring}: "
                f"ranks {list(self.sub.ranks)} -> {list(self.middle.ranks)} "
                f"-> {list(self.quotient.ranks)}")


def validate_ses(ses: ShortExactSequence) -> Validation:
    """Full structural check, reporting the first failure and its degree.

    Order: rings agree, the maps connect the right complexes, the three
    complexes are complexes, the two maps are chain maps, the composite
    is zero, ranks add up degreewise, and finally exactness by counting
    (inclusion injective, projection surjective, image size = kernel
    size in the middle).
    """
    rings = {ses.sub.ring, ses.middle.ring, ses.quotient.ring}
    if len(rings) != 1:
        return Validation(False, "ring", None,
                          "the three complexes live over different rings")
    if (ses.inclusion.source != ses.sub
            or ses.inclusion.target != ses.middle):
        return Validation(False, "structure", None,
                          "inclusion does not run sub -> middle")
    if (ses.projection.source != ses.middle
            or ses.projection.target != ses.quotient):
        return Validation(False, "structure", None,
                          "projection does not run middle -> quotient")
    for name, k in (("sub", ses.sub), ("middle", ses.middle),
                    ("quotient", ses.quotient)):
        v = k.validate()
        if not v:
            return Validation(False, "complex", v.degree,
                              f"{name} complex invalid: {v.message}")
    for name, f in (("inclusion", ses.inclusion),
                    ("projection", ses.projection)):
        v = f.validate()
        if not v:
            return Validation(False, "chain-map", v.degree,
                              f"{name} is not a chain map: {v.message}")
    if not (ses.projection @ ses.inclusion).is_zero():
        return Validation(False, "compose", None,
                          "projection after inclusion is nonzero")
    lo, hi = min(ses.sub.lo, ses.middle.lo, ses.quotient.lo), \
        max(ses.sub.hi, ses.middle.hi, ses.quotient.hi)
    for n in range(lo, hi + 1):
        if ses.sub.rank(n) + ses.quotient.rank(n) != ses.middle.rank(n):
            return Validation(False, "rank", n,
                              f"ranks at degree {n} do not add up")
    card = ses.ring.cardinality
    for n in range(lo, hi + 1):
        j, q = ses.inclusion.comp(n), ses.projection.comp(n)
        if kernel_count(j) != 1:
            return Validation(False, "exact", n,
                              f"inclusion has a kernel at degree {n}")
        if image_count(q) != card ** ses.quotient.rank(n):
            return Validation(False, "exact", n,
                              f"projection not onto at degree {n}")
        if image_count(j) != kernel_count(q):
            return Validation(False, "exact", n,
                              f"image of inclusion differs from kernel of "
                              f"projection at degree {n}")
    return _VALID


def find_section(ses: ShortExactSequence) -> dict[int, Matrix]:
    """Degreewise right inverse of the projection, solved column by column.

    Returns one matrix per degree where the quotient has positive rank,
    with projection @ section = identity there.  The section is a module
    map only, not a chain map in general.  Raises ValueError when some
    column has no preimage (i.e. the projection is not onto).
    """
    ring = ses.ring
    out: dict[int, Matrix] = {}
    for n in ses.quotient.degrees():
        rq = ses.quotient.rank(n)
        if rq == 0:
            continue
        q = ses.projection.comp(n)
        solver = LinearSolver(q)
        cols: list[tuple[RingElem, ...]] = []
        for i in range(rq):
            target = [ring.element(1 if r == i else 0) for r in range(rq)]
            rep = solver.solve(target)
            if not rep.solvable:
                raise ValueError(f"projection misses a basis vector "
                                 f"at degree {n}")
            cols.append(rep.witness)
        rl = ses.middle.rank(n)
        out[n] = Matrix(ring, rl, rq,
                        tuple(cols[j][i] for i in range(rl)
                              for j in range(rq)))
    return out


def _retraction(ses: ShortExactSequence,
                section: Mapping[int, Matrix]) -> dict[int, Matrix]:
    """Degreewise left inverse of the inclusion that kills the section.

    Solves inclusion @ r = identity - section @ projection per degree;
    the right-hand side lands in the kernel of the projection, which is
    exactly the image of the inclusion, so for a valid sequence every
    column has a (unique) preimage.
    """
    ring = ses.ring
    out: dict[int, Matrix] = {}
    for n in ses.middle.degrees():
        rl, rs = ses.middle.rank(n), ses.sub.rank(n)
        if rl * rs == 0:
            out[n] = Matrix.zero(ring, rs, rl)
            continue
        q = ses.projection.comp(n)
        s = section.get(n, Matrix.zero(ring, rl, ses.quotient.rank(n)))
        resid = Matrix.identity(ring, rl) - s @ q
        solver = LinearSolver(ses.inclusion.comp(n))
        cols: list[tuple[RingElem, ...]] = []
        for i in range(rl):
            rep = solver.solve([resid.entry(r, i) for r in range(rl)])
            if not rep.solvable:
                raise ValueError(f"no retraction at degree {n}: is the "
                                 f"sequence exact?")
            cols.append(rep.witness)
        out[n] = Matrix(ring, rs, rl,
                        tuple(cols[c][r] for r in range(rs)
                              for c in range(rl)))
    return out


def connecting_map(ses: ShortExactSequence) -> ChainMap:
    """The boundary of the sequence: a chain map quotient -> sub.shift(1).

    For an extension in canonical block form this is the glueing twist,
    read straight off the middle differential.  In general it is built
    from a degreewise splitting as retraction @ d_middle @ section; a
    different splitting changes the result by a null-homotopic map only,
    so everything downstream asks about null-homotopy classes.  Assumes
    the sequence is valid (run validate_ses first when in doubt).
    """
    target = ses.sub.shift(1)
    try:
        comps = extension_twist(ses)
    except ValueError:
        section = find_section(ses)
        retraction = _retraction(ses, section)
        comps = {}
        for n in ses.quotient.degrees():
            if ses.quotient.rank(n) * ses.sub.rank(n + 1) == 0:
                continue
            comps[n] = (retraction[n + 1] @ ses.middle.diff(n)
                        @ section[n])
    delta = ChainMap.build(ses.quotient, target, comps)
    check = delta.validate()
    if not check:
        raise RuntimeError(f"boundary map fails its chain condition at "
                           f"degree {check.degree}; solver bug")
    return delta


# ---------------------------------------------------------------------------
# Endomorphism triples over a short exact sequence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EndoTriple:
    """One chain endomorphism per complex of a short exact sequence."""

    on_sub: ChainMap
    on_middle: ChainMap
    on_quotient: ChainMap


@dataclass(frozen=True)
class SquareStatus:
    """How one of the two compatibility squares commutes.

    `strict` means the two composites around the square agree on the
    nose; `witness` is a null-homotopy of their difference if one exists
    (for a strict square that is the zero homotopy).  A square with
    witness None does not even commute up to homotopy.
    """

    strict: bool
    witness: Optional[Homotopy]

    @property
    def holds(self) -> bool:
        return self.witness is not None

    def describe(self) -> str:
        if self.strict:
            return "strict"
        if self.witness is not None:
            return "homotopy"
        return "none"


@dataclass(frozen=True)
class AdditivityReport:
    """Everything check_triple measured about one endomorphism triple."""

    left: SquareStatus
    right: SquareStatus
    sub_trace: RingElem
    middle_trace: RingElem
    quotient_trace: RingElem
    defect: RingElem            # middle - sub - quotient

    @property
    def squares_hold(self) -> bool:
        return self.left.holds and self.right.holds

    @property
    def additive(self) -> bool:
        return not self.defect

    @property
    def is_violation(self) -> bool:
        """Both squares commute at least up to homotopy, yet the graded
        traces fail to add up."""
        return self.squares_hold and not self.additive


def check_triple(ses: ShortExactSequence, triple: EndoTriple,
                 *,
                 left_problem: Optional[NullHomotopyProblem] = None,
                 right_problem: Optional[NullHomotopyProblem] = None,
                 ) -> AdditivityReport:
    """Measure one endomorphism triple against the sequence.

    Checks that each endo really is a chain endomorphism of its complex
    (ValueError otherwise), then decides each square: strict when the
    two composites agree, otherwise commuting up to homotopy when the
    difference is null-homotopic, with the homotopy kept as a witness.
    Trace arithmetic is reported regardless of the square verdicts.

    Callers doing this in a loop can pass prepared NullHomotopyProblem
    instances (sub->middle and middle->quotient) to amortise the SNF
    factorisations.  The sequence itself is not re-validated here.
    """
    pairs = ((triple.on_sub, ses.sub, "sub"),
             (triple.on_middle, ses.middle, "middle"),
             (triple.on_quotient, ses.quotient, "quotient"))
    for f, k, name in pairs:
        if f.source != k or f.target != k:
            raise ValueError(f"endo on {name} does not match the {name} "
                             f"complex")
        v = f.validate()
        if not v:
            raise ValueError(f"endo on {name} is not a chain map: "
                             f"{v.message}")

    j, q = ses.inclusion, ses.projection
    # both differences read "the composite through the middle endo, minus
    # the other way around", so a witness h satisfies d h + h d = difference
    left_diff = triple.on_middle @ j - j @ triple.on_sub
    right_diff = q @ triple.on_middle - triple.on_quotient @ q

    def status(diff: ChainMap,
               prob: Optional[NullHomotopyProblem]) -> SquareStatus:
        strict = diff.is_zero()
        if prob is None:
            prob = NullHomotopyProblem(diff.source, diff.target)
        return SquareStatus(strict, prob.solve_for(diff))

    left = status(left_diff, left_problem)
    right = status(right_diff, right_problem)
    ts = graded_trace(triple.on_sub)
    tm = graded_trace(triple.on_middle)
    tq = graded_trace(triple.on_quotient)
    return AdditivityReport(left, right, ts, tm, tq, tm - ts - tq)


def connecting_square(ses: ShortExactSequence, on_sub: ChainMap,
                      on_quotient: ChainMap,
                      *,
                      delta: Optional[ChainMap] = None,
                      problem: Optional[NullHomotopyProblem] = None,
                      ) -> SquareStatus:
    """The sequence's third square: the boundary map against the outer endos.

    The two visible squares never see how the sub and quotient endos
    interact across the glueing, and that blind spot is wide: even over a
    field one can cook up triples whose two squares commute up to
    homotopy while the traces refuse to add.  The missing constraint is
    this square — the boundary map `delta` (see connecting_map) must
    intertwine the shifted sub endo with the quotient endo, at least up
    to homotopy.  A triple passing all three squares is additive over
    every reduced ring; a square-zero element in the ring is what lets
    all three hold with a nonzero defect.

    Only the outer endos enter; the middle one is irrelevant here.  Both
    keyword arguments exist for callers in hot loops: `delta` as returned
    by connecting_map(ses), `problem` a prepared null-homotopy problem
    from the quotient to sub.shift(1).  Endos are assumed to be valid
    chain endomorphisms (check_triple enforces that).
    """
    if delta is None:
        delta = connecting_map(ses)
    diff = on_sub.shift(1) @ delta - delta @ on_quotient
    if problem is None:
        problem = NullHomotopyProblem(diff.source, diff.target)
    return SquareStatus(diff.is_zero(), problem.solve_for(diff))


# ---------------------------------------------------------------------------
# Building extensions: middle = sub (+) quotient with a twisted differential
# ---------------------------------------------------------------------------


def _twist_block(sub: PerfectComplex, quotient: PerfectComplex,
                 twist: Mapping[int, Matrix], n: int) -> Matrix:
    t = twist.get(n)
    want = (sub.rank(n + 1), quotient.rank(n))
    if t is None:
        return Matrix.zero(sub.ring, *want)
    if (t.rows, t.cols) != want:
        raise ValueError(f"twist at degree {n} is {t.rows}x{t.cols}, "
                         f"expected {want[0]}x{want[1]}")
    if t.ring != sub.ring:
        raise ValueError(f"twist at degree {n} lives over the wrong ring")
    return t


def make_extension(sub: PerfectComplex, quotient: PerfectComplex,
                   twist: Optional[Mapping[int, Matrix]] = None,
                   ) -> ShortExactSequence:
    """Assemble the short exact sequence with the given twisting maps.

    The middle complex is sub (+) quotient degreewise, with differential

        [ d_sub   twist ]
        [   0     d_quo ]

    where twist[n] maps quotient degree n into sub degree n+1.  For the
    result to be a complex the twist must satisfy

        d_sub^(n+1) twist^n + twist^(n+1) d_quo^n = 0

    (checked here; ValueError when it fails — enumerate CocycleSpace to
    get exactly the twists that pass).  The inclusion and projection are
    the block injection and projection, so the sequence is exact by
    construction.
    """
    if sub.ring != quotient.ring:
        raise ValueError("extension needs a common ring")
    ring = sub.ring
    twist = dict(twist or {})
    v = sub.validate()
    if not v:
        raise ValueError(f"sub complex invalid: {v.message}")
    v = quotient.validate()
    if not v:
        raise ValueError(f"quotient complex invalid: {v.message}")

    lo = min(sub.lo, quotient.lo)
    hi = max(sub.hi, quotient.hi)
    for n in range(lo - 1, hi + 1):
        lhs = (sub.diff(n + 1) @ _twist_block(sub, quotient, twist, n)
               + _twist_block(sub, quotient, twist, n + 1) @ quotient.diff(n))
        if not lhs.is_zero():
            raise ValueError(f"twist fails the compatibility equation "
                             f"at degree {n}")

    ranks = [sub.rank(n) + quotient.rank(n) for n in range(lo, hi + 1)]
    diffs = {}
    for n in range(lo, hi):
        diffs[n] = Matrix.block([
            [sub.diff(n), _twist_block(sub, quotient, twist, n)],
            [Matrix.zero(ring, quotient.rank(n + 1), sub.rank(n)),
             quotient.diff(n)],
        ])
    middle = PerfectComplex.build(ring, lo, ranks, diffs)

    inc = {}
    proj = {}
    for n in range(lo, hi + 1):
        rs, rq = sub.rank(n), quotient.rank(n)
        if rs:
            inc[n] = Matrix.block([[Matrix.identity(ring, rs)],
                                   [Matrix.zero(ring, rq, rs)]])
        if rq:
            proj[n] = Matrix.block([[Matrix.zero(ring, rq, rs),
                                     Matrix.identity(ring, rq)]])
    return ShortExactSequence(
        sub, middle, quotient,
        ChainMap.build(sub, middle, inc),
        ChainMap.build(middle, quotient, proj))


def extension_twist(ses: ShortExactSequence) -> dict[int, Matrix]:
    """Read the twist back off an extension in block form.

    Requires the inclusion and projection to be exactly the canonical
    block injection/projection (as produced by make_extension); raises
    ValueError otherwise, because then the top-right block of the middle
    differential has no preferred meaning.
    """
    sub, mid, quo = ses.sub, ses.middle, ses.quotient
    ring = ses.ring
    lo, hi = min(sub.lo, quo.lo), max(sub.hi, quo.hi)
    for n in range(lo, hi + 1):
        rs, rq = sub.rank(n), quo.rank(n)
        want_j = Matrix.block([[Matrix.identity(ring, rs)],
                               [Matrix.zero(ring, rq, rs)]])
        want_q = Matrix.block([[Matrix.zero(ring, rq, rs),
                                Matrix.identity(ring, rq)]])
        if ses.inclusion.comp(n) != want_j or ses.projection.comp(n) != want_q:
            raise ValueError("extension is not in block form")
    out = {}
    for n in range(lo, hi):
        rs_next, rq = sub.rank(n + 1), quo.rank(n)
        if rs_next * rq:
            d = mid.diff(n)
            out[n] = Matrix(ring, rs_next, rq,
                            tuple(d.entry(i, sub.rank(n) + j)
                                  for i in range(rs_next)
                                  for j in range(rq)))
    return out


class CocycleSpace:
    """All legal twists for make_extension(sub, quotient, ...).

    Unknowns are the entries of every twist block (degree order, then
    row-major); the compatibility equations cut out a submodule, handled
    by the same SNF solver as every other linear question here.  Yields
    plain {degree: matrix} dicts ready to feed to make_extension.
    """

    def __init__(self, sub: PerfectComplex, quotient: PerfectComplex):
        if sub.ring != quotient.ring:
            raise ValueError("twists need a common ring")
        self.sub, self.quotient = sub, quotient
        ring = sub.ring
        lo, hi = _union_window(sub, quotient)
        self.var_slots: list[tuple[int, int, int]] = []
        offsets: dict[int, int] = {}
        pos = 0
        for n in range(lo - 1, hi + 1):
            r, c = sub.rank(n + 1), quotient.rank(n)
            if r * c:
                self.var_slots.append((n, r, c))
                offsets[n] = pos
                pos += r * c
        self.n_vars = pos
        rows: list[list[RingElem]] = []
        zero = ring.zero()
        for n in range(lo - 1, hi + 1):
            ds, dq = sub.diff(n + 1), quotient.diff(n)
            er, ec = sub.rank(n + 2), quotient.rank(n)
            if er * ec == 0:
                continue
            for i in range(er):
                for j in range(ec):
                    row = [zero] * pos
                    if n in offsets:                 # d_sub^(n+1) twist^n
                        base = offsets[n]
                        for k in range(sub.rank(n + 1)):
                            row[base + k * ec + j] = ds.entry(i, k)
                    if n + 1 in offsets:             # twist^(n+1) d_quo^n
                        base = offsets[n + 1]
                        cs = quotient.rank(n + 1)
                        for k in range(cs):
                            idx = base + i * cs + k
                            row[idx] = row[idx] + dq.entry(k, j)
                    rows.append(row)
        mat = (Matrix.from_rows(ring, rows) if rows
               else Matrix.zero(ring, 0, pos))
        self.solver = LinearSolver(mat)
        self._zero_rhs = [ring.zero()] * mat.rows

    @property
    def count(self) -> int:
        return self.solver.kernel_count

    def to_twist(self, vec: Sequence[RingElem]) -> dict[int, Matrix]:
        out = {}
        pos = 0
        for n, r, c in self.var_slots:
            out[n] = Matrix(self.sub.ring, r, c, tuple(vec[pos:pos + r * c]))
            pos += r * c
        return out

    def iter_all(self) -> Iterator[dict[int, Matrix]]:
        for vec in self.solver.iter_solutions(self._zero_rhs):
            yield self.to_twist(vec)

    def sample(self, rng: Random) -> dict[int, Matrix]:
        vec = self.solver.sample_solution(self._zero_rhs, rng)
        assert vec is not None
        return self.to_twist(vec)
