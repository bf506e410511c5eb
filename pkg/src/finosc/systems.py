"""Shared containers for signal dictionaries.

A signal is a length-p complex128 vector of unit norm.  A SignalSystem is a
stack of signals plus per-signal provenance saying which construction, which
group (line or torus) and which character produced each row.  Signals are
stored after a fixed phase normalization: the first coordinate of magnitude
above PHASE_TOL is rotated to the positive real axis.  Basis claims are
always phase-insensitive; the normalization only pins the exported bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

PHASE_TOL = 1e-8
GRAM_TOL = 1e-9

_ID_TAG = {
    "heisenberg": "hei",
    "split-oscillator": "spl",
    "nonsplit-oscillator": "nsp",
    "extended": "ext",
    "random": "rnd",
}


@dataclass(frozen=True)
class Provenance:
    family: str  # one of _ID_TAG's keys
    group: int  # line index or torus index within the owning system
    char: int  # character index within the group
    origin: tuple | None = None  # line direction, or conjugator as a 4-tuple
    translate: tuple[int, int] | None = None  # (tau, w) for extended signals
    parent: str | None = None  # base signal id for extended signals


def signal_id(prov: Provenance) -> str:
    tag = _ID_TAG[prov.family]
    if prov.family == "heisenberg":
        return f"{tag}-l{prov.group:02d}-c{prov.char:02d}"
    if prov.family == "random":
        return f"{tag}-{prov.group:03d}"
    if prov.family == "extended":
        tau, w = prov.translate
        return f"{tag}-{prov.parent}-s{tau:02d}m{w:02d}"
    return f"{tag}-t{prov.group:03d}-c{prov.char:02d}"


@dataclass
class SignalSystem:
    p: int
    family: str  # selector: heisenberg | split | nonsplit | oscillator | extended | random
    signals: np.ndarray  # (n, p) complex128, rows unit norm
    provenance: list[Provenance]
    tori: list | None = None  # Torus registry indexed by provenance.group
    lines: list | None = None  # Line registry indexed by provenance.group
    ids: list[str] = field(init=False)

    def __post_init__(self):
        self.signals = np.asarray(self.signals, dtype=np.complex128)
        if self.signals.ndim != 2 or self.signals.shape[1] != self.p:
            raise ValueError(f"signals must be (n, {self.p}), got {self.signals.shape}")
        if len(self.provenance) != self.signals.shape[0]:
            raise ValueError("provenance length does not match signal count")
        norms = np.linalg.norm(self.signals, axis=1)
        if norms.size and np.max(np.abs(norms - 1.0)) > GRAM_TOL:
            worst = int(np.argmax(np.abs(norms - 1.0)))
            raise ValueError(f"signal {worst} has norm {norms[worst]!r}, expected 1")
        self.ids = [signal_id(pr) for pr in self.provenance]

    def __len__(self):
        return self.signals.shape[0]

    def index_of(self, ident: str | int) -> int:
        if isinstance(ident, int) or (isinstance(ident, str) and ident.lstrip("-").isdigit()):
            i = int(ident)
            if not 0 <= i < len(self):
                raise KeyError(f"signal index {i} out of range 0..{len(self) - 1}")
            return i
        try:
            return self.ids.index(ident)
        except ValueError:
            raise KeyError(f"unknown signal id {ident!r}") from None

    def group_indices(self, group: int) -> np.ndarray:
        return np.array([i for i, pr in enumerate(self.provenance) if pr.group == group])


def phase_normalize(v: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    mags = np.abs(v)
    above = mags > tol
    if not above.any():
        raise ValueError("cannot phase-normalize a zero vector")
    i = int(np.argmax(above))
    return v * (np.conj(v[i]) / mags[i])


def phase_normalize_rows(block: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    return np.vstack([phase_normalize(row, tol) for row in block])


def max_gram_deviation(block: np.ndarray) -> float:
    """Largest entrywise deviation of the Gram matrix from the identity."""
    g = block @ block.conj().T
    return float(np.max(np.abs(g - np.eye(block.shape[0]))))


def offset_groups(provs: list[Provenance], offset: int) -> list[Provenance]:
    return [replace(pr, group=pr.group + offset) for pr in provs]
