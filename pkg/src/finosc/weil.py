"""Unitary operators attached to the unimodular group, built from three
generators acting on complex functions on Z/pZ:

    scaling    (scale_a f)(t) = sgn(a) f(t/a)        sgn = quadratic character
    chirp      (chirp_u f)(t) = psi(-(u/2) t^2) f(t)
    fourier    (four f)(w)    = p^(-1/2) sum_t psi(w t) f(t)

A group element maps to the composition of generator operators along its
cell factorization: chirp(u) scale(a) on the lower cell and
chirp(u2) scale(a) four chirp(u1) on the big cell.  The assignment is
projective: products agree with the image of the group product up to a
unimodular scalar, and every downstream claim is invariant under that
scalar.  No extra normalization constant is applied (the global unitary
scale is fixed to 1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .field import legendre, mod_inv, psi_table, require_odd_prime
from .sl2 import BruhatFactors, SL2Element, bruhat_decompose


@dataclass(frozen=True)
class Operator:
    """A p x p unitary with a label recording how it was assembled."""

    matrix: np.ndarray
    label: str
    p: int

    def apply(self, signal: np.ndarray) -> np.ndarray:
        return self.matrix @ signal

    def __matmul__(self, other: "Operator") -> "Operator":
        return Operator(self.matrix @ other.matrix, f"{self.label}*{other.label}", self.p)


@lru_cache(maxsize=None)
def fourier_matrix(p: int) -> np.ndarray:
    require_odd_prime(p)
    t = np.arange(p)
    mat = psi_table(p)[np.outer(t, t) % p] / math.sqrt(p)
    mat.flags.writeable = False
    return mat


def chirp_diagonal(u: int, p: int) -> np.ndarray:
    t = np.arange(p)
    half = (p + 1) // 2  # 1/2 mod p; exists because p is odd
    return psi_table(p)[(-u * half * t * t) % p]


def _scaling_dense(a: int, p: int) -> np.ndarray:
    a %= p
    sgn = legendre(a, p)
    mat = np.zeros((p, p), dtype=np.complex128)
    s = np.arange(p)
    mat[(a * s) % p, s] = sgn
    return mat


def scaling_operator(a: int, p: int) -> Operator:
    require_odd_prime(p)
    if a % p == 0:
        raise ValueError("scaling parameter must be a unit")
    return Operator(_scaling_dense(a, p), f"scale({a % p})", p)


def chirp_operator(u: int, p: int) -> Operator:
    require_odd_prime(p)
    return Operator(np.diag(chirp_diagonal(u, p)), f"chirp({u % p})", p)


def fourier_operator(p: int) -> Operator:
    return Operator(fourier_matrix(p), "fourier", p)


def _bruhat_matrix(fac: BruhatFactors) -> np.ndarray:
    p = fac.p
    if fac.big_cell:
        x = fourier_matrix(p) * chirp_diagonal(fac.u1, p)[None, :]
        perm = (mod_inv(fac.a, p) * np.arange(p)) % p
        x = legendre(fac.a, p) * x[perm, :]
        return x * chirp_diagonal(fac.u2, p)[:, None]
    return _scaling_dense(fac.a, p) * chirp_diagonal(fac.u, p)[:, None]


def _bruhat_label(fac: BruhatFactors) -> str:
    if fac.big_cell:
        return f"chirp({fac.u2})*scale({fac.a})*fourier*chirp({fac.u1})"
    return f"chirp({fac.u})*scale({fac.a})"


def weil_operator(g: SL2Element) -> Operator:
    """The operator attached to g, composed along its cell factorization."""
    fac = bruhat_decompose(g)
    return Operator(_bruhat_matrix(fac), _bruhat_label(fac), g.p)


def apply_factors(fac: BruhatFactors, block: np.ndarray) -> np.ndarray:
    """Apply the operator of a factorization to rows of block.

    Matrix-free fast path for bulk generation: chirps cost O(p) per signal,
    scaling is a signed permutation, the fourier factor runs through the FFT.
    Agrees with the dense operator to machine precision.
    """
    p = fac.p
    out = np.atleast_2d(np.asarray(block, dtype=np.complex128))
    if fac.big_cell:
        out = out * chirp_diagonal(fac.u1, p)[None, :]
        out = math.sqrt(p) * np.fft.ifft(out, axis=1)
        out = _apply_scaling(out, fac.a, p)
        out = out * chirp_diagonal(fac.u2, p)[None, :]
    else:
        out = _apply_scaling(out, fac.a, p)
        out = out * chirp_diagonal(fac.u, p)[None, :]
    return out


def _apply_scaling(block: np.ndarray, a: int, p: int) -> np.ndarray:
    idx = (mod_inv(a, p) * np.arange(p)) % p
    return legendre(a, p) * block[:, idx]
