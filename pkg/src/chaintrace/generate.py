"""Seeded random generators for every object the library works with.

All functions take an explicit random.Random so runs are reproducible;
nothing here touches global random state.  Constrained objects (valid
complexes, chain maps, twists, diagonal fillers for strict triples) are
sampled through the exact linear solver, so a "random X" is always a
genuine X — no generate-and-pray loops except where noted.
"""

from __future__ import annotations

from random import Random
from typing import Optional

from .complexes import ChainMap, ChainMapSpace, Homotopy, PerfectComplex
from .detline import NotAutomorphismError, det_of_automorphism
from .linalg import LinearSolver, Matrix
from .rings import RingElem, RingSpec
from .ses import (
    CocycleSpace,
    EndoTriple,
    ShortExactSequence,
    extension_twist,
    make_extension,
)


def random_element(rng: Random, ring: RingSpec) -> RingElem:
    return ring.from_index(rng.randrange(ring.cardinality))


def random_matrix(rng: Random, ring: RingSpec, rows: int, cols: int) -> Matrix:
    return Matrix(ring, rows, cols,
                  tuple(random_element(rng, ring)
                        for _ in range(rows * cols)))


def random_complex(rng: Random, ring: RingSpec, *, max_window: int,
                   max_rank: int, lo: int = 0) -> PerfectComplex:
    """A valid complex with at most max_window occupied degrees starting
    at lo, each rank drawn from 0..max_rank.

    The first differential is uniform; each later one is uniform among
    the matrices compatible with its predecessor (rows sampled from the
    kernel of the transpose), so d^2 = 0 holds by construction.
    """
    width = rng.randint(1, max_window)
    ranks = [rng.randint(0, max_rank) for _ in range(width)]
    diffs: dict[int, Matrix] = {}
    prev: Optional[Matrix] = None
    for i in range(width - 1):
        rows, cols = ranks[i + 1], ranks[i]
        if prev is None or prev.cols == 0:
            d = random_matrix(rng, ring, rows, cols)
        else:
            solver = LinearSolver(prev.transpose())
            zero = [ring.zero()] * prev.cols
            ents: list[RingElem] = []
            for _ in range(rows):
                row = solver.sample_solution(zero, rng)
                assert row is not None
                ents.extend(row)
            d = Matrix(ring, rows, cols, tuple(ents))
        diffs[lo + i] = d
        prev = d if cols else None
    return PerfectComplex.build(ring, lo, ranks, diffs)


def random_chain_map(rng: Random, source: PerfectComplex,
                     target: PerfectComplex) -> ChainMap:
    """Uniform over all chain maps source -> target (builds the space
    each call; hold a ChainMapSpace yourself inside hot loops)."""
    return ChainMapSpace(source, target).sample(rng)


def random_chain_endo(rng: Random, k: PerfectComplex) -> ChainMap:
    return random_chain_map(rng, k, k)


def random_homotopy(rng: Random, source: PerfectComplex,
                    target: PerfectComplex) -> Homotopy:
    """Uniform degree -1 map; components are unconstrained."""
    comps = {}
    for n in range(min(source.lo, target.lo),
                   max(source.hi, target.hi) + 2):
        r, c = target.rank(n - 1), source.rank(n)
        if r * c:
            comps[n] = random_matrix(rng, source.ring, r, c)
    return Homotopy.build(source, target, comps)


def random_cocycle(rng: Random, sub: PerfectComplex,
                   quotient: PerfectComplex) -> dict[int, Matrix]:
    """Uniform legal twist for make_extension(sub, quotient, ...)."""
    return CocycleSpace(sub, quotient).sample(rng)


def random_extension(rng: Random, ring: RingSpec, *, max_window: int,
                     max_rank: int) -> ShortExactSequence:
    """Random sub and quotient complexes glued along a random twist."""
    sub = random_complex(rng, ring, max_window=max_window, max_rank=max_rank)
    quo = random_complex(rng, ring, max_window=max_window, max_rank=max_rank)
    return make_extension(sub, quo, random_cocycle(rng, sub, quo))


# ---------------------------------------------------------------------------
# Strict triples: endomorphisms in block-triangular form
# ---------------------------------------------------------------------------


class DiagonalFillerSystem:
    """Solve for the off-diagonal block that makes a block-triangular
    endomorphism of an extension into a chain map.

    For fixed sub and quotient complexes, an endo pair (u on sub, w on
    quotient) extends to v = [[u, t], [0, w]] on the twisted sum exactly
    when  d_sub t - t d_quo = u twist - twist w  degree by degree; the
    unknown block t is linear in that equation, with coefficient matrix
    depending only on the two differentials.  Factor once, fill many.
    """

    def __init__(self, sub: PerfectComplex, quotient: PerfectComplex):
        if sub.ring != quotient.ring:
            raise ValueError("extension pieces need a common ring")
        self.sub, self.quotient = sub, quotient
        ring = sub.ring
        lo = min(sub.lo, quotient.lo)
        hi = max(sub.hi, quotient.hi)
        self._lo, self._hi = lo, hi
        self.var_slots: list[tuple[int, int, int]] = []
        offsets: dict[int, int] = {}
        pos = 0
        for n in range(lo, hi + 1):
            r, c = sub.rank(n), quotient.rank(n)
            if r * c:
                self.var_slots.append((n, r, c))
                offsets[n] = pos
                pos += r * c
        self.n_vars = pos
        self.eq_slots: list[tuple[int, int, int]] = []
        rows: list[list[RingElem]] = []
        zero = ring.zero()
        for n in range(lo, hi + 1):
            er, ec = sub.rank(n + 1), quotient.rank(n)
            if er * ec == 0:
                continue
            self.eq_slots.append((n, er, ec))
            ds, dq = sub.diff(n), quotient.diff(n)
            for i in range(er):
                for j in range(ec):
                    row = [zero] * pos
                    if n in offsets:                 # d_sub^n t^n
                        base = offsets[n]
                        for k in range(sub.rank(n)):
                            row[base + k * ec + j] = ds.entry(i, k)
                    if n + 1 in offsets:             # - t^(n+1) d_quo^n
                        base = offsets[n + 1]
                        cs = self.quotient.rank(n + 1)
                        for k in range(cs):
                            idx = base + i * cs + k
                            row[idx] = row[idx] - dq.entry(k, j)
                    rows.append(row)
        mat = (Matrix.from_rows(ring, rows) if rows
               else Matrix.zero(ring, 0, pos))
        self.solver = LinearSolver(mat)

    def _rhs(self, twist: dict[int, Matrix], u: ChainMap,
             w: ChainMap) -> list[RingElem]:
        ring = self.sub.ring
        out: list[RingElem] = []
        for n, er, ec in self.eq_slots:
            t_n = twist.get(n, Matrix.zero(ring, er, ec))
            rhs = u.comp(n + 1) @ t_n - t_n @ w.comp(n)
            out.extend(rhs.entries)
        return out

    def fill(self, twist: dict[int, Matrix], u: ChainMap, w: ChainMap,
             rng: Optional[Random] = None) -> Optional[dict[int, Matrix]]:
        """The off-diagonal block as {degree: matrix}, or None when the
        pair (u, w) admits no strict extension over this twist.  With an
        rng, the filler is drawn uniformly from all of them."""
        b = self._rhs(twist, u, w)
        if rng is None:
            rep = self.solver.solve(b)
            vec = rep.witness if rep.solvable else None
        else:
            vec = self.solver.sample_solution(b, rng)
        if vec is None:
            return None
        out = {}
        pos = 0
        for n, r, c in self.var_slots:
            out[n] = Matrix(self.sub.ring, r, c, tuple(vec[pos:pos + r * c]))
            pos += r * c
        return out


def assemble_block_endo(ses: ShortExactSequence, u: ChainMap, w: ChainMap,
                        filler: dict[int, Matrix]) -> ChainMap:
    """The endomorphism [[u, filler], [0, w]] of the middle complex."""
    ring = ses.ring
    blocks = {}
    for n in ses.middle.degrees():
        rs, rq = ses.sub.rank(n), ses.quotient.rank(n)
        t = filler.get(n, Matrix.zero(ring, rs, rq))
        blocks[n] = Matrix.block([
            [u.comp(n), t],
            [Matrix.zero(ring, rq, rs), w.comp(n)]])
    return ChainMap.build(ses.middle, ses.middle, blocks)


def random_strict_triple(rng: Random, ses: ShortExactSequence, *,
                         attempts: int = 64,
                         automorphisms: bool = False,
                         ) -> Optional[EndoTriple]:
    """A triple (u, v, w) making both squares commute strictly, with v
    block-triangular; None if `attempts` endo pairs all fail to extend.

    With automorphisms=True, u and w are resampled until each is a
    degreewise automorphism (so v is one too, being block-triangular
    with unit diagonal determinants).
    """
    twist = extension_twist(ses)
    filler_sys = DiagonalFillerSystem(ses.sub, ses.quotient)
    sub_space = ChainMapSpace(ses.sub, ses.sub)
    quo_space = ChainMapSpace(ses.quotient, ses.quotient)

    def pick(space: ChainMapSpace) -> Optional[ChainMap]:
        for _ in range(attempts):
            f = space.sample(rng)
            if not automorphisms:
                return f
            try:
                det_of_automorphism(f)
                return f
            except NotAutomorphismError:
                continue
        return None

    for _ in range(attempts):
        u, w = pick(sub_space), pick(quo_space)
        if u is None or w is None:
            return None
        filler = filler_sys.fill(twist, u, w, rng)
        if filler is None:
            continue
        v = assemble_block_endo(ses, u, w, filler)
        return EndoTriple(u, v, w)
    return None
