"""Arithmetic in the prime field Z/pZ and its character groups.

Everything downstream is built over a fixed odd prime p at desk scale
(p <= 97 by default in the CLI).  Residues travel as plain ints in
[0, p); complex values are numpy complex128.  The additive character is
psi(t) = exp(2*pi*i*t/p).  Multiplicative characters are tabulated on
powers of the smallest primitive root, which also fixes the character
indexing used by every basis construction, so all orderings are
reproducible run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def is_odd_prime(n: int) -> bool:
    if n < 3 or n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def require_odd_prime(p: int) -> None:
    if not is_odd_prime(p):
        raise ValueError(f"{p} is not an odd prime")


def mod_inv(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 is not invertible mod {p}")
    return pow(a, -1, p)


def legendre(a: int, p: int) -> int:
    """Quadratic character of a mod p, as +1 or -1.  Undefined at 0."""
    a %= p
    if a == 0:
        raise ValueError(f"quadratic character undefined at 0 mod {p}")
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return tuple(out)


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/pZ)^*.  Smallest, so the choice is canonical."""
    require_odd_prime(p)
    n = p - 1
    for g in range(2, p):
        if all(pow(g, n // q, p) != 1 for q in _prime_factors(n)):
            return g
    raise RuntimeError(f"no primitive root found mod {p}")  # unreachable for prime p


@lru_cache(maxsize=None)
def smallest_nonresidue(p: int) -> int:
    require_odd_prime(p)
    for a in range(2, p):
        if legendre(a, p) == -1:
            return a
    raise RuntimeError(f"no non-residue mod {p}")  # unreachable for odd prime p


@lru_cache(maxsize=None)
def psi_table(p: int) -> np.ndarray:
    """psi(k) = exp(2*pi*i*k/p) for k in [0, p), read-only."""
    require_odd_prime(p)
    tab = np.exp(2j * np.pi * np.arange(p) / p)
    tab.flags.writeable = False
    return tab


def additive_character(t: int, p: int) -> complex:
    return complex(psi_table(p)[t % p])


@lru_cache(maxsize=None)
def dlog_table(p: int) -> np.ndarray:
    """dlog[x] = j with g^j = x for the canonical primitive root g; dlog[0] = -1."""
    g = primitive_root(p)
    tab = np.full(p, -1, dtype=np.int64)
    x = 1
    for j in range(p - 1):
        tab[x] = j
        x = (x * g) % p
    tab.flags.writeable = False
    return tab


@dataclass(frozen=True)
class FpElement:
    """A residue mod an odd prime, with field arithmetic on the usual operators."""

    value: int
    p: int

    def __post_init__(self):
        require_odd_prime(self.p)
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> "FpElement":
        if isinstance(other, FpElement):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other
        if isinstance(other, int):
            return FpElement(other, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value + o.value, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value - o.value, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(o.value - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else FpElement(self.value * o.value, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElement(-self.value, self.p)

    def inv(self) -> "FpElement":
        return FpElement(mod_inv(self.value, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else self * o.inv()

    def __pow__(self, e: int):
        if e < 0 and self.value == 0:
            raise ZeroDivisionError(f"0 is not invertible mod {self.p}")
        return FpElement(pow(self.value, e, self.p), self.p)

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, int):
            return self.value == other % self.p
        return isinstance(other, FpElement) and (self.value, self.p) == (other.value, other.p)

    def __hash__(self):
        return hash((self.value, self.p))

    def __repr__(self):
        return f"FpElement({self.value}, p={self.p})"


@dataclass(frozen=True)
class MultiplicativeCharacter:
    """Character of (Z/pZ)^*, tabulated on powers of the canonical primitive root.

    table[j] = chi(g^j) = exp(2*pi*i*index*j/(p-1)).  Index 0 is the trivial
    character; index (p-1)/2 coincides pointwise with the quadratic character.
    """

    p: int
    index: int
    table: np.ndarray = field(repr=False, compare=False)

    def __call__(self, x: int) -> complex:
        j = int(dlog_table(self.p)[x % self.p])
        if j < 0:
            raise ValueError(f"character undefined at 0 mod {self.p}")
        return complex(self.table[j])

    def values_on_units(self) -> np.ndarray:
        """chi(x) for x = 1..p-1 in natural order."""
        dl = dlog_table(self.p)
        return self.table[dl[1:]]


def enumerate_mult_characters(p: int) -> list[MultiplicativeCharacter]:
    require_odd_prime(p)
    n = p - 1
    out = []
    for k in range(n):
        tab = np.exp(2j * np.pi * k * np.arange(n) / n)
        tab.flags.writeable = False
        out.append(MultiplicativeCharacter(p, k, tab))
    return out
