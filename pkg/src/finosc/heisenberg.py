"""The finite Heisenberg group, its standard representation, and the
line-indexed orthonormal bases it produces.

Elements are triples (tau, w, z) of residues with the twisted product

    (tau, w, z) * (tau', w', z') = (tau + tau', w + w', z + z' + (tau w' - tau' w)/2).

The representation sends (tau, w, z) to the unitary

    (op f)(t) = psi(tau w / 2 + z) psi(w t) f(t + tau),

a time shift by tau followed by modulation by w, with the phase chosen so
the assignment is a genuine homomorphism for the product above (checked
exhaustively in the test suite).  Restricted to a line through the origin
of the (tau, w) plane the operators commute, so averaging against the p
characters of the line yields rank-one projectors whose images form an
orthonormal basis; ranging over all p+1 lines gives p(p+1) signals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import psi_table, require_odd_prime
from .systems import Provenance, SignalSystem, max_gram_deviation, phase_normalize
from .weil import Operator

PROJECTOR_TOL = 1e-9


@dataclass(frozen=True)
class HeisenbergElement:
    tau: int
    w: int
    z: int
    p: int

    def __post_init__(self):
        require_odd_prime(self.p)
        for name in ("tau", "w", "z"):
            object.__setattr__(self, name, getattr(self, name) % self.p)

    @classmethod
    def identity(cls, p: int) -> "HeisenbergElement":
        return cls(0, 0, 0, p)

    def __mul__(self, o: "HeisenbergElement") -> "HeisenbergElement":
        p = self.p
        half = (p + 1) // 2
        z = self.z + o.z + half * (self.tau * o.w - o.tau * self.w)
        return HeisenbergElement(self.tau + o.tau, self.w + o.w, z, p)

    def inverse(self) -> "HeisenbergElement":
        return HeisenbergElement(-self.tau, -self.w, -self.z, self.p)


def heisenberg_matrix(tau: int, w: int, z: int, p: int) -> np.ndarray:
    psi = psi_table(p)
    half = (p + 1) // 2
    t = np.arange(p)
    mat = np.zeros((p, p), dtype=np.complex128)
    mat[t, (t + tau) % p] = psi[((half * tau * w + z) + w * t) % p]
    return mat


def heisenberg_operator(h: HeisenbergElement) -> Operator:
    return Operator(
        heisenberg_matrix(h.tau, h.w, h.z, h.p),
        f"translate({h.tau},{h.w},{h.z})",
        h.p,
    )


def heisenberg_apply(phi: np.ndarray, tau: int, w: int, z: int, p: int) -> np.ndarray:
    """Apply the operator of (tau, w, z) to one signal in O(p)."""
    psi = psi_table(p)
    half = (p + 1) // 2
    t = np.arange(p)
    return psi[((half * tau * w + z) % p + w * t) % p] * phi[(t + tau) % p]


@dataclass(frozen=True)
class Line:
    """A line through the origin of the (tau, w) plane, direction (1, m) or (0, 1)."""

    p: int
    direction: tuple[int, int]

    @property
    def points(self) -> tuple[tuple[int, int], ...]:
        dt, dw = self.direction
        return tuple(((s * dt) % self.p, (s * dw) % self.p) for s in range(self.p))


def enumerate_lines(p: int) -> list[Line]:
    require_odd_prime(p)
    return [Line(p, (1, m)) for m in range(p)] + [Line(p, (0, 1))]


def line_basis(line: Line) -> np.ndarray:
    """Orthonormal eigenbasis of the line subgroup, one row per character.

    Row k is the normalized image of a standard basis vector under the
    averaging projector (1/p) sum_s conj(psi(k s)) op(s * direction), never an
    eigensolver, so the output is deterministic.
    """
    p = line.p
    dt, dw = line.direction
    mats = np.stack([heisenberg_matrix((s * dt) % p, (s * dw) % p, 0, p) for s in range(p)])
    projectors = np.fft.fft(mats, axis=0) / p
    signals = np.empty((p, p), dtype=np.complex128)
    for k in range(p):
        proj = projectors[k]
        trace = proj.trace()
        if abs(trace - 1.0) > 1e-6:
            raise RuntimeError(
                f"line {line.direction} character {k}: projector trace {trace:.6g}, expected 1"
            )
        diag = proj.diagonal().real
        j = int(np.argmax(diag))
        vec = proj[:, j] / np.sqrt(diag[j])
        signals[k] = phase_normalize(vec)
    dev = max_gram_deviation(signals)
    if dev > PROJECTOR_TOL:
        raise RuntimeError(f"line {line.direction} basis deviates from orthonormal by {dev:g}")
    return signals


def heisenberg_system(p: int) -> SignalSystem:
    """All p(p+1) line-basis signals, grouped line by line."""
    lines = enumerate_lines(p)
    blocks, prov = [], []
    for i, line in enumerate(lines):
        blocks.append(line_basis(line))
        prov.extend(
            Provenance("heisenberg", i, k, origin=line.direction) for k in range(p)
        )
    return SignalSystem(p, "heisenberg", np.vstack(blocks), prov, lines=lines)
