"""Graded traces and the null-homotopy solver.

The graded trace of a chain endomorphism u is sum_n (-1)^n Tr(u^n).  It
is invariant under homotopy perturbation: adding d h + h d never moves
it, which the telescoping of Tr(d h) against Tr(h d) makes exact here,
not just up to something negligible.

Whether a chain map f is null-homotopic is one linear question: assemble
f^n = d h^n + h^(n+1) d over all degrees as a single system in the
entries of h and hand it to the SNF solver.  `NullHomotopyProblem`
factors that system once per (source, target) pair so searches can test
many maps cheaply; `find_null_homotopy` is the one-shot wrapper.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .complexes import ChainMap, Homotopy, PerfectComplex, _union_window
from .linalg import LinearSolver, Matrix
from .rings import RingElem


def graded_trace(u: ChainMap) -> RingElem:
    """Alternating-sign trace of a chain endomorphism."""
    if u.source != u.target:
        raise ValueError("graded trace needs an endomorphism "
                         "(source == target)")
    acc = u.ring.zero()
    for n in u.source.degrees():
        t = u.comp(n).trace()
        acc = acc - t if n % 2 else acc + t
    return acc


def perturb(f: ChainMap, h: Homotopy) -> ChainMap:
    """f + d h + h d, a chain map homotopic to f by construction."""
    if h.source != f.source or h.target != f.target:
        raise ValueError("homotopy does not match the map's source/target")
    src, tgt = f.source, f.target
    comps = {}
    for n in f.degrees():
        comps[n] = (f.comp(n)
                    + tgt.diff(n - 1) @ h.comp(n)
                    + h.comp(n + 1) @ src.diff(n))
    return ChainMap.build(src, tgt, comps)


class NullHomotopyProblem:
    """The linear system 'f = d h + h d' for maps source -> target.

    Unknowns are the entries of the homotopy components h^n, ordered by
    degree then row-major; equations are the entries of d h^n + h^(n+1) d
    in the same layout as `flatten_map`.  Built once, solved per map.
    """

    def __init__(self, source: PerfectComplex, target: PerfectComplex):
        if source.ring != target.ring:
            raise ValueError("need a common ring")
        self.source, self.target = source, target
        ring = source.ring
        lo, hi = _union_window(source, target)
        self.var_slots: list[tuple[int, int, int]] = []
        offsets: dict[int, int] = {}
        pos = 0
        for n in range(lo, hi + 2):
            r, c = target.rank(n - 1), source.rank(n)
            if r * c:
                self.var_slots.append((n, r, c))
                offsets[n] = pos
                pos += r * c
        self.n_vars = pos
        self.eq_slots: list[tuple[int, int, int]] = []
        rows: list[list[RingElem]] = []
        zero = ring.zero()
        for n in range(lo, hi + 1):
            er, ec = target.rank(n), source.rank(n)
            if er * ec == 0:
                continue
            self.eq_slots.append((n, er, ec))
            dt = target.diff(n - 1)     # target^(n-1) -> target^n
            ds = source.diff(n)         # source^n -> source^(n+1)
            for i in range(er):
                for j in range(ec):
                    row = [zero] * pos
                    if n in offsets:                     # d h^n term
                        base = offsets[n]
                        for k in range(target.rank(n - 1)):
                            row[base + k * ec + j] = dt.entry(i, k)
                    if n + 1 in offsets:                 # h^(n+1) d term
                        base = offsets[n + 1]
                        cs = source.rank(n + 1)
                        for k in range(cs):
                            idx = base + i * cs + k
                            row[idx] = row[idx] + ds.entry(k, j)
                    rows.append(row)
        mat = (Matrix.from_rows(ring, rows) if rows
               else Matrix.zero(ring, 0, pos))
        self.solver = LinearSolver(mat)

    def flatten_map(self, f: ChainMap) -> list[RingElem]:
        """f's entries in equation order (degree, then row-major)."""
        out: list[RingElem] = []
        for n, _, _ in self.eq_slots:
            out.extend(f.comp(n).entries)
        return out

    def _to_homotopy(self, vec: Sequence[RingElem]) -> Homotopy:
        comps = {}
        pos = 0
        for n, r, c in self.var_slots:
            comps[n] = Matrix(self.source.ring, r, c,
                              tuple(vec[pos:pos + r * c]))
            pos += r * c
        return Homotopy.build(self.source, self.target, comps)

    def coset_key(self, f: ChainMap) -> tuple[int, ...]:
        """Complete invariant of f modulo maps of the form d h + h d: two
        maps get the same key exactly when their difference is one, so
        equality of keys decides 'homotopic' without solving twice."""
        return self.solver.coset_key(self.flatten_map(f))

    def solve_for(self, f: ChainMap) -> Optional[Homotopy]:
        rep = self.solver.solve(self.flatten_map(f))
        if not rep.solvable:
            return None
        h = self._to_homotopy(rep.witness)
        # soundness re-check: the witness must satisfy f = d h + h d exactly
        if perturb(ChainMap.zero(self.source, self.target), h) != f:
            raise RuntimeError("null-homotopy witness failed re-evaluation; "
                               "solver bug")
        return h


def find_null_homotopy(f: ChainMap) -> Optional[Homotopy]:
    """A homotopy h with f = d h + h d, or None if there is none.

    The witness is whichever solution SNF back-substitution produces
    first (reproducible, not canonical), re-checked by evaluation before
    being returned.
    """
    check = f.validate()
    if not check:
        raise ValueError(f"not a chain map: {check.message}")
    return NullHomotopyProblem(f.source, f.target).solve_for(f)


def are_homotopic(f: ChainMap, g: ChainMap) -> Optional[Homotopy]:
    """A homotopy between f and g (i.e. f - g = d h + h d), or None."""
    if f.source != g.source or f.target != g.target:
        raise ValueError("maps have different source or target")
    return find_null_homotopy(f - g)
