"""Arithmetic in Z/m and in Z/m[e] with e^2 = 0.

Every element is kept in canonical residue form (0 <= a, b < m), so
dataclass equality and hashing are reliable.  All values are immutable;
arithmetic returns fresh elements and never mutates.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterator, Optional


class RingMismatchError(ValueError):
    """Operands belong to different rings."""


def _prime_factors(m: int) -> dict[int, int]:
    """Prime factorisation by trial division (moduli here are small)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


@dataclass(frozen=True)
class RingSpec:
    """The coefficient ring: Z/modulus, optionally extended by e with e^2 = 0."""

    modulus: int
    has_epsilon: bool = False

    def __post_init__(self) -> None:
        if self.modulus < 2:
            raise ValueError(f"modulus must be >= 2, got {self.modulus}")

    # -- construction ------------------------------------------------------

    def element(self, a: int = 0, b: int = 0) -> "RingElem":
        return RingElem(self, a, b)

    def zero(self) -> "RingElem":
        return RingElem(self, 0, 0)

    def one(self) -> "RingElem":
        return RingElem(self, 1, 0)

    def epsilon(self) -> "RingElem":
        if not self.has_epsilon:
            raise ValueError(f"{self} has no e")
        return RingElem(self, 0, 1)

    # -- enumeration -------------------------------------------------------

    @property
    def cardinality(self) -> int:
        return self.modulus * self.modulus if self.has_epsilon else self.modulus

    def from_index(self, i: int) -> "RingElem":
        """Inverse of RingElem.index: 0 <= i < cardinality."""
        if not 0 <= i < self.cardinality:
            raise ValueError(f"index {i} out of range for {self}")
        return RingElem(self, i % self.modulus, i // self.modulus)

    def elements(self) -> Iterator["RingElem"]:
        """All ring elements in index order (deterministic)."""
        for i in range(self.cardinality):
            yield self.from_index(i)

    # -- structure ---------------------------------------------------------

    def is_reduced(self) -> bool:
        """True iff the ring has no nonzero nilpotents.

        This needs has_epsilon to be false and the modulus squarefree.
        """
        if self.has_epsilon:
            return False
        m = self.modulus
        d = 2
        while d * d <= m:
            if m % d == 0:
                m //= d
                if m % d == 0:
                    return False
            else:
                d += 1
        return True

    def nilpotent_witness(self) -> Optional["RingElem"]:
        """A nonzero element squaring to zero, or None if the ring is reduced.

        Over Z/m[e] the witness is e.  Over Z/m it is the minimal positive
        x with x^2 = 0 mod m, namely the product of p^ceil(v/2) over the
        prime powers p^v dividing m; this is nonzero exactly when m is not
        squarefree (e.g. 2 for m=4, 4 for m=8, 6 for m=12).
        """
        if self.has_epsilon:
            return self.epsilon()
        x = 1
        for p, v in _prime_factors(self.modulus).items():
            x *= p ** ((v + 1) // 2)
        if x == self.modulus:
            return None
        return self.element(x)

    def __str__(self) -> str:
        return f"Z/{self.modulus}[e]" if self.has_epsilon else f"Z/{self.modulus}"


@dataclass(frozen=True, slots=True)
class RingElem:
    """An element a + b*e of a RingSpec, stored with 0 <= a, b < modulus."""

    ring: RingSpec
    a: int
    b: int = 0

    def __post_init__(self) -> None:
        m = self.ring.modulus
        object.__setattr__(self, "a", self.a % m)
        object.__setattr__(self, "b", self.b % m)
        if self.b and not self.ring.has_epsilon:
            raise ValueError(f"{self.ring} has no e-part")

    def _check(self, other: "RingElem") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise RingMismatchError(f"{self.ring} vs {other.ring}")

    def __add__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.ring, self.a + other.a, self.b + other.b)

    def __sub__(self, other: "RingElem") -> "RingElem":
        self._check(other)
        return RingElem(self.ring, self.a - other.a, self.b - other.b)

    def __neg__(self) -> "RingElem":
        return RingElem(self.ring, -self.a, -self.b)

    def __mul__(self, other: "RingElem") -> "RingElem":
        # (a + b e)(c + d e) = ac + (ad + bc) e   since e^2 = 0
        self._check(other)
        return RingElem(
            self.ring,
            self.a * other.a,
            self.a * other.b + self.b * other.a,
        )

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def is_unit(self) -> bool:
        """a + b*e is invertible iff a is invertible mod m; b plays no role."""
        return gcd(self.a, self.ring.modulus) == 1

    def inverse(self) -> "RingElem":
        """Multiplicative inverse, found by exhaustive search (rings are tiny)."""
        one = self.ring.one()
        for y in self.ring.elements():
            if self * y == one:
                return y
        raise ValueError(f"{self} is not a unit in {self.ring}")

    @property
    def index(self) -> int:
        """Canonical position in the ring's element order: a + m*b."""
        return self.a + self.ring.modulus * self.b

    def __str__(self) -> str:
        if self.b == 0:
            return str(self.a)
        e_part = "e" if self.b == 1 else f"{self.b}*e"
        if self.a == 0:
            return e_part
        return f"{self.a}+{e_part}"
