"""Bounded complexes of finite free modules, chain maps and homotopy data.

Cohomological indexing throughout: the differential of degree n raises,
d^n : C^n -> C^(n+1), and maps act on column vectors from the left.
Degrees outside a complex's stored window are rank zero; accessors
materialise correctly-shaped empty matrices there, so boundary cases
never need special handling at call sites.

Complexes built through `PerfectComplex.build` are normalised (zero-rank
degrees trimmed from both ends), which makes dataclass equality agree
with "same ranks and differentials in the same degrees".
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random
from typing import Iterator, Mapping, Optional, Sequence

from .linalg import LinearSolver, Matrix, ShapeError
from .rings import RingElem, RingSpec


@dataclass(frozen=True)
class Validation:
    """Outcome of a structural check; `degree` is the first failing one."""

    ok: bool
    kind: str = "ok"            # "ok" | "ring" | "shape" | "d-squared" | ...
    degree: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


_VALID = Validation(True)


@dataclass(frozen=True)
class PerfectComplex:
    """A bounded complex of free modules: ranks per degree plus differentials.

    ranks[i] is the rank in degree lo+i; diffs[i] is d^(lo+i), one fewer
    than there are degrees.  Use `build` (which trims zero-rank edges and
    fills in omitted zero differentials) unless deliberately constructing
    something malformed for `validate` to report on.
    """

    ring: RingSpec
    lo: int
    ranks: tuple[int, ...]
    diffs: tuple[Matrix, ...]

    def __post_init__(self) -> None:
        if not self.ranks:
            raise ValueError("a complex needs at least one degree")
        if len(self.diffs) != len(self.ranks) - 1:
            raise ValueError("need exactly one differential per adjacent "
                             "pair of degrees")

    @classmethod
    def build(cls, ring: RingSpec, lo: int, ranks: Sequence[int],
              diffs: Optional[Mapping[int, Matrix]] = None) -> "PerfectComplex":
        ranks = list(ranks)
        if any(r < 0 for r in ranks):
            raise ValueError("ranks must be non-negative")
        diffs = dict(diffs or {})
        # trim zero-rank degrees off both ends
        while len(ranks) > 1 and ranks[0] == 0:
            ranks.pop(0)
            lo += 1
        while len(ranks) > 1 and ranks[-1] == 0:
            ranks.pop()
        if ranks == [0]:
            lo = 0
        seq = []
        for i in range(len(ranks) - 1):
            n = lo + i
            d = diffs.get(n)
            if d is None:
                d = Matrix.zero(ring, ranks[i + 1], ranks[i])
            seq.append(d)
        return cls(ring, lo, tuple(ranks), tuple(seq))

    @classmethod
    def single(cls, ring: RingSpec, degree: int, rank: int) -> "PerfectComplex":
        """A free module of the given rank concentrated in one degree."""
        return cls.build(ring, degree, [rank])

    # -- window ------------------------------------------------------------

    @property
    def hi(self) -> int:
        return self.lo + len(self.ranks) - 1

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, n: int) -> int:
        if self.lo <= n <= self.hi:
            return self.ranks[n - self.lo]
        return 0

    def diff(self, n: int) -> Matrix:
        """d^n : C^n -> C^(n+1); an empty/zero matrix outside the window."""
        if self.lo <= n < self.hi:
            return self.diffs[n - self.lo]
        return Matrix.zero(self.ring, self.rank(n + 1), self.rank(n))

    # -- invariants ----------------------------------------------------------

    def euler_rank(self) -> int:
        """Alternating sum of ranks, sum of (-1)^n rank(n)."""
        return sum(-r if n % 2 else r
                   for n, r in zip(self.degrees(), self.ranks))

    def validate(self) -> Validation:
        for i, d in enumerate(self.diffs):
            n = self.lo + i
            if d.ring != self.ring:
                return Validation(False, "ring", n,
                                  f"differential at degree {n} lives over "
                                  f"{d.ring}, complex over {self.ring}")
            want = (self.ranks[i + 1], self.ranks[i])
            if (d.rows, d.cols) != want:
                return Validation(False, "shape", n,
                                  f"d^{n} is {d.rows}x{d.cols}, expected "
                                  f"{want[0]}x{want[1]}")
        for i in range(len(self.diffs) - 1):
            n = self.lo + i
            if not (self.diffs[i + 1] @ self.diffs[i]).is_zero():
                return Validation(False, "d-squared", n,
                                  f"d^{n + 1} d^{n} != 0")
        return _VALID

    # -- constructions -------------------------------------------------------

    def shift(self, k: int) -> "PerfectComplex":
        """Translate degrees by k and scale differentials by (-1)^k."""
        diffs = self.diffs if k % 2 == 0 else tuple(-d for d in self.diffs)
        new_lo = self.lo - k
        return PerfectComplex.build(
            self.ring, new_lo, self.ranks,
            {new_lo + i: d for i, d in enumerate(diffs)})

    def __str__(self) -> str:
        return (f"complex over {self.ring}, degrees {self.lo}..{self.hi}, "
                f"ranks {list(self.ranks)}")


def direct_sum(a: PerfectComplex, b: PerfectComplex) -> PerfectComplex:
    if a.ring != b.ring:
        raise ValueError("direct sum needs a common ring")
    lo, hi = min(a.lo, b.lo), max(a.hi, b.hi)
    ranks = [a.rank(n) + b.rank(n) for n in range(lo, hi + 1)]
    diffs = {}
    for n in range(lo, hi):
        diffs[n] = Matrix.block([
            [a.diff(n), Matrix.zero(a.ring, a.rank(n + 1), b.rank(n))],
            [Matrix.zero(a.ring, b.rank(n + 1), a.rank(n)), b.diff(n)],
        ])
    return PerfectComplex.build(a.ring, lo, ranks, diffs)


def _union_window(src: PerfectComplex, tgt: PerfectComplex) -> tuple[int, int]:
    return min(src.lo, tgt.lo), max(src.hi, tgt.hi)


@dataclass(frozen=True)
class ChainMap:
    """A degreewise map f^n : source^n -> target^n, stored over the union
    window of the two complexes (zero-shaped blocks included)."""

    source: PerfectComplex
    target: PerfectComplex
    lo: int
    comps: tuple[Matrix, ...]

    @classmethod
    def build(cls, source: PerfectComplex, target: PerfectComplex,
              comps: Optional[Mapping[int, Matrix]] = None) -> "ChainMap":
        if source.ring != target.ring:
            raise ValueError("chain map needs a common ring")
        comps = dict(comps or {})
        lo, hi = _union_window(source, target)
        seq = []
        for n in range(lo, hi + 1):
            f = comps.get(n)
            if f is None:
                f = Matrix.zero(source.ring, target.rank(n), source.rank(n))
            seq.append(f)
        return cls(source, target, lo, tuple(seq))

    @classmethod
    def zero(cls, source: PerfectComplex, target: PerfectComplex) -> "ChainMap":
        return cls.build(source, target)

    @classmethod
    def identity(cls, k: PerfectComplex) -> "ChainMap":
        return cls.build(k, k, {n: Matrix.identity(k.ring, k.rank(n))
                                for n in k.degrees()})

    @property
    def ring(self) -> RingSpec:
        return self.source.ring

    def comp(self, n: int) -> Matrix:
        i = n - self.lo
        if 0 <= i < len(self.comps):
            return self.comps[i]
        return Matrix.zero(self.ring, self.target.rank(n), self.source.rank(n))

    def degrees(self) -> range:
        return range(self.lo, self.lo + len(self.comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def _check_parallel(self, other: "ChainMap") -> None:
        if self.source != other.source or self.target != other.target:
            raise ValueError("chain maps have different source or target")

    def __add__(self, other: "ChainMap") -> "ChainMap":
        self._check_parallel(other)
        return ChainMap.build(self.source, self.target,
                              {n: self.comp(n) + other.comp(n)
                               for n in self.degrees()})

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        self._check_parallel(other)
        return ChainMap.build(self.source, self.target,
                              {n: self.comp(n) - other.comp(n)
                               for n in self.degrees()})

    def __neg__(self) -> "ChainMap":
        return ChainMap.build(self.source, self.target,
                              {n: -self.comp(n) for n in self.degrees()})

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition self after other."""
        if other.target != self.source:
            raise ValueError("composition mismatch: inner target is not "
                             "outer source")
        lo = min(self.lo, other.lo)
        hi = max(self.lo + len(self.comps), other.lo + len(other.comps)) - 1
        return ChainMap.build(other.source, self.target,
                              {n: self.comp(n) @ other.comp(n)
                               for n in range(lo, hi + 1)})

    def shift(self, k: int) -> "ChainMap":
        """The same components read between the k-shifted complexes.

        Both differentials pick up the same (-1)^k, so this is again a
        chain map; the component at degree n becomes the old one at n+k.
        """
        return ChainMap.build(self.source.shift(k), self.target.shift(k),
                              {n - k: self.comp(n) for n in self.degrees()})

    def validate(self) -> Validation:
        for n in self.degrees():
            f = self.comp(n)
            if f.ring != self.ring:
                return Validation(False, "ring", n,
                                  f"component at degree {n} over {f.ring}")
            want = (self.target.rank(n), self.source.rank(n))
            if (f.rows, f.cols) != want:
                return Validation(False, "shape", n,
                                  f"component at degree {n} is "
                                  f"{f.rows}x{f.cols}, expected "
                                  f"{want[0]}x{want[1]}")
        for n in range(self.lo - 1, self.lo + len(self.comps) + 1):
            lhs = self.target.diff(n) @ self.comp(n)
            rhs = self.comp(n + 1) @ self.source.diff(n)
            if lhs != rhs:
                return Validation(False, "commute", n,
                                  f"d f != f d at degree {n}")
        return _VALID


def validate_chain_map(f: ChainMap) -> Validation:
    return f.validate()


def validate_complex(k: PerfectComplex) -> Validation:
    return k.validate()


@dataclass(frozen=True)
class Homotopy:
    """Degree -1 data h^n : source^n -> target^(n-1), stored like ChainMap."""

    source: PerfectComplex
    target: PerfectComplex
    lo: int
    comps: tuple[Matrix, ...]

    @classmethod
    def build(cls, source: PerfectComplex, target: PerfectComplex,
              comps: Optional[Mapping[int, Matrix]] = None) -> "Homotopy":
        if source.ring != target.ring:
            raise ValueError("homotopy needs a common ring")
        comps = dict(comps or {})
        lo, hi = _union_window(source, target)
        seq = []
        for n in range(lo, hi + 2):
            h = comps.get(n)
            if h is None:
                h = Matrix.zero(source.ring, target.rank(n - 1),
                                source.rank(n))
            seq.append(h)
        return cls(source, target, lo, tuple(seq))

    @classmethod
    def zero(cls, source: PerfectComplex, target: PerfectComplex) -> "Homotopy":
        return cls.build(source, target)

    @property
    def ring(self) -> RingSpec:
        return self.source.ring

    def comp(self, n: int) -> Matrix:
        i = n - self.lo
        if 0 <= i < len(self.comps):
            return self.comps[i]
        return Matrix.zero(self.ring, self.target.rank(n - 1),
                           self.source.rank(n))

    def degrees(self) -> range:
        return range(self.lo, self.lo + len(self.comps))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def validate(self) -> Validation:
        for n in self.degrees():
            h = self.comp(n)
            want = (self.target.rank(n - 1), self.source.rank(n))
            if (h.rows, h.cols) != want:
                return Validation(False, "shape", n,
                                  f"homotopy component at degree {n} is "
                                  f"{h.rows}x{h.cols}, expected "
                                  f"{want[0]}x{want[1]}")
        return _VALID


def mapping_cone(f: ChainMap) -> PerfectComplex:
    """Cone(f)^n = source^(n+1) (+) target^n with differential
    [[-d_src, 0], [f, d_tgt]]."""
    check = f.validate()
    if not check:
        raise ValueError(f"mapping cone needs a valid chain map: "
                         f"{check.message}")
    src, tgt = f.source, f.target
    ring = f.ring
    lo = min(src.lo - 1, tgt.lo)
    hi = max(src.hi - 1, tgt.hi)
    ranks = [src.rank(n + 1) + tgt.rank(n) for n in range(lo, hi + 1)]
    diffs = {}
    for n in range(lo, hi):
        diffs[n] = Matrix.block([
            [-src.diff(n + 1),
             Matrix.zero(ring, src.rank(n + 2), tgt.rank(n))],
            [f.comp(n + 1), tgt.diff(n)],
        ])
    return PerfectComplex.build(ring, lo, ranks, diffs)


# ---------------------------------------------------------------------------
# The space of chain maps between two fixed complexes
# ---------------------------------------------------------------------------


def _flatten_blocks(mats: Sequence[Matrix]) -> list[RingElem]:
    out: list[RingElem] = []
    for m in mats:
        out.extend(m.entries)
    return out


class ChainMapSpace:
    """All chain maps source -> target, as the kernel of one linear system.

    Unknowns are the entries of every component f^n, ordered by degree and
    then row-major; equations say d f^n - f^(n+1) d = 0 degree by degree.
    Exposes exact counting, deterministic enumeration and uniform sampling,
    all through the shared SNF solver.
    """

    def __init__(self, source: PerfectComplex, target: PerfectComplex):
        if source.ring != target.ring:
            raise ValueError("chain maps need a common ring")
        self.source, self.target = source, target
        ring = source.ring
        lo, hi = _union_window(source, target)
        self.var_slots: list[tuple[int, int, int]] = []
        offsets: dict[int, int] = {}
        pos = 0
        for n in range(lo, hi + 1):
            r, c = target.rank(n), source.rank(n)
            if r * c:
                self.var_slots.append((n, r, c))
                offsets[n] = pos
                pos += r * c
        self.n_vars = pos
        rows: list[list[RingElem]] = []
        zero = ring.zero()
        for n in range(lo, hi + 1):
            dt, ds = target.diff(n), source.diff(n)
            er, ec = target.rank(n + 1), source.rank(n)
            if er * ec == 0:
                continue
            for i in range(er):
                for j in range(ec):
                    row = [zero] * pos
                    if n in offsets:                       # d_tgt^n f^n term
                        base = offsets[n]
                        for k in range(target.rank(n)):
                            row[base + k * ec + j] = dt.entry(i, k)
                    if n + 1 in offsets:                   # -f^(n+1) d_src^n
                        base = offsets[n + 1]
                        cs = source.rank(n + 1)
                        for k in range(cs):
                            idx = base + i * cs + k
                            row[idx] = row[idx] - ds.entry(k, j)
                    rows.append(row)
        mat = (Matrix.from_rows(ring, rows) if rows
               else Matrix.zero(ring, 0, pos))
        self.solver = LinearSolver(mat)
        self._zero_rhs = [ring.zero()] * mat.rows

    @property
    def count(self) -> int:
        """Exact number of chain maps source -> target."""
        return self.solver.kernel_count

    def to_map(self, vec: Sequence[RingElem]) -> ChainMap:
        comps = {}
        pos = 0
        for n, r, c in self.var_slots:
            comps[n] = Matrix(self.source.ring, r, c,
                              tuple(vec[pos:pos + r * c]))
            pos += r * c
        return ChainMap.build(self.source, self.target, comps)

    def iter_all(self) -> Iterator[ChainMap]:
        for vec in self.solver.iter_solutions(self._zero_rhs):
            yield self.to_map(vec)

    def sample(self, rng: Random) -> ChainMap:
        vec = self.solver.sample_solution(self._zero_rhs, rng)
        assert vec is not None  # homogeneous systems always have 0
        return self.to_map(vec)
