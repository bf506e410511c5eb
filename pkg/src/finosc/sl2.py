"""The group of unimodular 2x2 matrices over Z/pZ, its cell decomposition,
and its maximal tori.

Conventions.  Matrices are [[a, b], [c, d]] with det = ad - bc = 1 mod p.
The unipotent subgroup is strictly lower triangular, the diagonal subgroup
holds diag(a, 1/a), and the rotation element is w = [[0, 1], [-1, 0]].
Every group element factors either as

    unipotent * diagonal                    (b = 0, "lower cell")
    unipotent * diagonal * w * unipotent    (b != 0, "big cell")

and the factors are unique.  Tori come in two kinds: conjugates of the
diagonal subgroup (order p-1, "split") and conjugates of the stabilizer of
an anisotropic bilinear form (order p+1, "nonsplit").
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .field import legendre, mod_inv, primitive_root, require_odd_prime, smallest_nonresidue


@dataclass(frozen=True)
class SL2Element:
    a: int
    b: int
    c: int
    d: int
    p: int

    def __post_init__(self):
        require_odd_prime(self.p)
        p = self.p
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, getattr(self, name) % p)
        if (self.a * self.d - self.b * self.c) % p != 1:
            raise ValueError(f"matrix {(self.a, self.b, self.c, self.d)} has det != 1 mod {p}")

    @classmethod
    def identity(cls, p: int) -> "SL2Element":
        return cls(1, 0, 0, 1, p)

    @classmethod
    def rotation(cls, p: int) -> "SL2Element":
        """w = [[0, 1], [-1, 0]], the order-4 rotation by a quarter turn."""
        return cls(0, 1, -1, 0, p)

    @classmethod
    def diagonal(cls, a: int, p: int) -> "SL2Element":
        return cls(a, 0, 0, mod_inv(a, p), p)

    def __mul__(self, o: "SL2Element") -> "SL2Element":
        p = self.p
        return SL2Element(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
            p,
        )

    def inv(self) -> "SL2Element":
        return SL2Element(self.d, -self.b, -self.c, self.a, self.p)

    def __pow__(self, n: int) -> "SL2Element":
        if n < 0:
            return self.inv() ** (-n)
        out = SL2Element.identity(self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def order(self, cap: int | None = None) -> int:
        cap = cap if cap is not None else self.p * (self.p * self.p - 1)
        e = SL2Element.identity(self.p)
        x = self
        for k in range(1, cap + 1):
            if x == e:
                return k
            x = x * self
        raise RuntimeError(f"order of {self.as_tuple()} exceeds cap {cap}")

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"SL2Element({self.a},{self.b},{self.c},{self.d}; p={self.p})"


def sp_elements(p: int) -> list[SL2Element]:
    """All p(p-1)(p+1) unimodular matrices, in a fixed enumeration order."""
    require_odd_prime(p)
    out = []
    for a in range(p):
        for b in range(p):
            if a == 0:
                if b == 0:
                    continue
                c = (-mod_inv(b, p)) % p
                out.extend(SL2Element(0, b, c, d, p) for d in range(p))
            else:
                ainv = mod_inv(a, p)
                out.extend(SL2Element(a, b, c, (1 + b * c) * ainv, p) for c in range(p))
    return out


@dataclass(frozen=True)
class BruhatFactors:
    """Cell factorization of one group element.

    Lower cell  (u is set):        g = low(u) * diag(a, 1/a)
    Big cell    (u1, u2 are set):  g = low(u2) * diag(a, 1/a) * w * low(u1)

    where low(x) = [[1, 0], [x, 1]].
    """

    p: int
    a: int
    u: int | None = None
    u2: int | None = None
    u1: int | None = None

    @property
    def big_cell(self) -> bool:
        return self.u is None

    def recompose(self) -> SL2Element:
        p = self.p
        diag = SL2Element.diagonal(self.a, p)
        if not self.big_cell:
            return SL2Element(1, 0, self.u, 1, p) * diag
        w = SL2Element.rotation(p)
        return SL2Element(1, 0, self.u2, 1, p) * diag * w * SL2Element(1, 0, self.u1, 1, p)


def bruhat_decompose(g: SL2Element) -> BruhatFactors:
    p = g.p
    if g.b % p == 0:
        # [[a, 0], [u*a, 1/a]]: the (2,1) entry determines u since a != 0
        return BruhatFactors(p=p, a=g.a, u=(g.c * mod_inv(g.a, p)) % p)
    binv = mod_inv(g.b, p)
    return BruhatFactors(p=p, a=g.b, u2=(g.d * binv) % p, u1=(g.a * binv) % p)


@dataclass(frozen=True)
class Torus:
    """A maximal commutative subgroup, stored as a sorted element tuple.

    generator has full order |elements|; witness conjugates the standard
    torus of the same kind onto this one (the identity for the standards).
    """

    p: int
    kind: str  # "split" | "nonsplit"
    elements: tuple[SL2Element, ...]
    generator: SL2Element
    witness: SL2Element

    def __len__(self):
        return len(self.elements)

    @property
    def key(self) -> tuple:
        return tuple(m.as_tuple() for m in self.elements)

    def __contains__(self, g: SL2Element) -> bool:
        return g in self.elements


def _sorted_elements(elems) -> tuple[SL2Element, ...]:
    return tuple(sorted(elems, key=lambda m: m.as_tuple()))


@lru_cache(maxsize=None)
def standard_torus(p: int) -> Torus:
    require_odd_prime(p)
    elems = _sorted_elements(SL2Element.diagonal(a, p) for a in range(1, p))
    gen = SL2Element.diagonal(primitive_root(p), p)
    return Torus(p, "split", elems, gen, SL2Element.identity(p))


@lru_cache(maxsize=None)
def nonsplit_standard_torus(p: int) -> Torus:
    """Stabilizer of the form (t,w).(t',w') = t t' + delta w w'.

    delta is chosen so -delta is a non-residue (1 when p = 3 mod 4, else the
    smallest non-residue), which keeps the form anisotropic and the
    stabilizer a cyclic group of order p+1 for every odd p.
    """
    require_odd_prime(p)
    delta = 1 if p % 4 == 3 else smallest_nonresidue(p)
    keep = []
    for g in sp_elements(p):
        if (
            (g.a * g.a + delta * g.c * g.c) % p == 1
            and (g.a * g.b + delta * g.c * g.d) % p == 0
            and (g.b * g.b + delta * g.d * g.d) % p == delta % p
        ):
            keep.append(g)
    if len(keep) != p + 1:
        raise RuntimeError(f"form stabilizer mod {p} has {len(keep)} elements, expected {p + 1}")
    elems = _sorted_elements(keep)
    gen = next(x for x in elems if x.order(cap=p + 1) == p + 1)
    return Torus(p, "nonsplit", elems, gen, SL2Element.identity(p))


def conjugate_torus(base: Torus, g: SL2Element) -> Torus:
    ginv = g.inv()
    elems = _sorted_elements(g * t * ginv for t in base.elements)
    return Torus(base.p, base.kind, elems, g * base.generator * ginv, g)


def torus_representatives(p: int) -> list[SL2Element]:
    """One conjugator per split torus: g = [[1, b], [c, 1 + b c]].

    For b != 0 the parameters (b, c) and (-b, c + 1/b) conjugate the diagonal
    torus to the same subgroup, so only the lexicographically smaller of the
    pair is kept; the b = 0 column is kept whole.  p(p+1)/2 in total.
    """
    require_odd_prime(p)
    reps = []
    for b in range(p):
        for c in range(p):
            if b != 0:
                partner = ((-b) % p, (c + mod_inv(b, p)) % p)
                if partner < (b, c):
                    continue
            reps.append(SL2Element(1, b, c, 1 + b * c, p))
    return reps


def enumerate_tori(p: int, kind: str) -> list[Torus]:
    """Every torus of the given kind, each exactly once, in a fixed order."""
    if kind == "split":
        base = standard_torus(p)
        return [conjugate_torus(base, r) for r in torus_representatives(p)]
    if kind != "nonsplit":
        raise ValueError(f"unknown torus kind {kind!r}")
    base = nonsplit_standard_torus(p)
    seen: dict[tuple, Torus] = {}
    for g in sp_elements(p):
        ginv = g.inv()
        elems = _sorted_elements(g * t * ginv for t in base.elements)
        key = tuple(m.as_tuple() for m in elems)
        if key not in seen:
            seen[key] = Torus(p, "nonsplit", elems, g * base.generator * ginv, g)
    return list(seen.values())
