"""Torus-indexed signal dictionaries.

For a maximal torus T of order n with generator gamma, the operators
U^j = weil_operator(gamma)^j commute, and averaging them against the n
characters of a cyclic group yields a resolution of the identity into
projectors of rank 0, 1 or 2.  Keeping one unit vector per rank-one
projector gives the basis attached to T: p-2 vectors for a split torus
(one character picks up rank 2) and p vectors for a nonsplit torus (one
character drops out).  Any other rank pattern means the phase alignment
broke and is treated as an internal error.

Because the operator assignment is only projective, U^n is a unimodular
scalar mu times the identity rather than the identity itself.  Dividing the
j-th power by the principal n-th root of mu makes the powers an honest
cyclic group again; the induced relabeling of characters is a fixed offset
and harmless since all characters are enumerated.

The split dictionary is generated by transporting the standard-torus basis
with the factorized operators (cheap, O(p^4 log p) overall); the projector
route is kept available as an independent cross-check, and the nonsplit
dictionary always uses it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import psi_table
from .sl2 import (
    SL2Element,
    Torus,
    bruhat_decompose,
    conjugate_torus,
    enumerate_tori,
    standard_torus,
    torus_representatives,
)
from .systems import (
    GRAM_TOL,
    Provenance,
    SignalSystem,
    max_gram_deviation,
    offset_groups,
    phase_normalize,
    phase_normalize_rows,
    signal_id,
)
from .weil import apply_factors, fourier_matrix, weil_operator

ALIGN_TOL = 1e-8
PROJECTOR_TOL = 1e-9
MATCH_TOL = 1e-6


def _aligned_power_stack(torus: Torus) -> np.ndarray:
    """[U^0, ..., U^(n-1)] with U rescaled so that U^n is exactly the identity."""
    n = len(torus)
    p = torus.p
    gen = weil_operator(torus.generator).matrix
    powers = np.empty((n, p, p), dtype=np.complex128)
    x = np.eye(p, dtype=np.complex128)
    for j in range(n):
        powers[j] = x
        x = gen @ x
    # x is now U^n = mu * identity for some unimodular mu
    mu = x.trace() / p
    if abs(abs(mu) - 1.0) > ALIGN_TOL or np.max(np.abs(x - mu * np.eye(p))) > ALIGN_TOL:
        raise RuntimeError(
            f"torus power misalignment: generator^({n}) is not scalar "
            f"(witness {torus.witness.as_tuple()}, kind {torus.kind})"
        )
    zeta = np.exp(1j * np.angle(mu) / n)
    powers *= zeta ** -np.arange(n)[:, None, None]
    return powers


def _character_projectors(powers: np.ndarray) -> np.ndarray:
    # projector k = (1/n) sum_j exp(-2 pi i j k / n) U^j, which is a DFT along axis 0
    n = powers.shape[0]
    return np.fft.fft(powers, axis=0) / n


def _projector_rank(proj: np.ndarray, torus: Torus, k: int) -> int:
    herm = float(np.max(np.abs(proj - proj.conj().T)))
    idem = float(np.max(np.abs(proj @ proj - proj)))
    if herm > PROJECTOR_TOL or idem > PROJECTOR_TOL:
        raise RuntimeError(
            f"character {k} of torus (witness {torus.witness.as_tuple()}, {torus.kind}): "
            f"averaging did not produce a projector (hermitian dev {herm:g}, idempotent dev {idem:g})"
        )
    trace = proj.trace()
    rank = int(round(trace.real))
    if abs(trace - rank) > 1e-6 or rank not in (0, 1, 2):
        raise RuntimeError(
            f"character {k} of torus (witness {torus.witness.as_tuple()}, {torus.kind}): "
            f"projector trace {trace:.6g} outside the expected rank set {{0, 1, 2}}"
        )
    return rank


def character_projector(torus: Torus, chi_index: int) -> np.ndarray:
    """Averaging projector of one torus character, indexed against the generator."""
    n = len(torus)
    if not 0 <= chi_index < n:
        raise ValueError(f"character index {chi_index} out of range 0..{n - 1}")
    powers = _aligned_power_stack(torus)
    phases = np.exp(-2j * np.pi * chi_index * np.arange(n) / n)
    proj = np.tensordot(phases, powers, axes=1) / n
    _projector_rank(proj, torus, chi_index)
    return proj


@dataclass
class TorusBasis:
    torus: Torus
    signals: np.ndarray  # (k, p), one row per rank-one character
    chars: list[int]  # character indices of the rows
    ranks: list[int]  # rank census over all characters


def torus_basis(torus: Torus) -> TorusBasis:
    """One unit signal per rank-one character of the torus, in character order."""
    p = torus.p
    projectors = _character_projectors(_aligned_power_stack(torus))
    rows, chars, ranks = [], [], []
    for k in range(len(torus)):
        proj = projectors[k]
        rank = _projector_rank(proj, torus, k)
        ranks.append(rank)
        if rank != 1:
            continue
        diag = proj.diagonal().real
        j = int(np.argmax(diag))
        vec = proj[:, j] / np.sqrt(diag[j])
        rows.append(phase_normalize(vec))
        chars.append(k)
    if sum(ranks) != p:
        raise RuntimeError(
            f"rank census of torus (witness {torus.witness.as_tuple()}) sums to "
            f"{sum(ranks)}, expected the space dimension {p}"
        )
    signals = np.vstack(rows)
    dev = max_gram_deviation(signals)
    if dev > PROJECTOR_TOL:
        raise RuntimeError(f"torus basis deviates from orthonormal by {dev:g}")
    return TorusBasis(torus, signals, chars, ranks)


def split_system(p: int) -> SignalSystem:
    """All split-torus signals: the standard basis transported to every torus.

    The standard-torus basis is built once by character averaging; each of the
    p(p+1)/2 conjugate tori then receives its basis by one factorized operator
    application, re-phased and re-verified orthonormal.  (p-2) * p(p+1)/2
    signals in total.
    """
    base = standard_torus(p)
    base_basis = torus_basis(base)
    tori, blocks, prov = [], [], []
    for i, rep in enumerate(torus_representatives(p)):
        tori.append(conjugate_torus(base, rep))
        block = apply_factors(bruhat_decompose(rep), base_basis.signals)
        block = phase_normalize_rows(block)
        dev = max_gram_deviation(block)
        if dev > GRAM_TOL:
            raise RuntimeError(f"transported basis {rep.as_tuple()} deviates by {dev:g}")
        blocks.append(block)
        prov.extend(
            Provenance("split-oscillator", i, k, origin=rep.as_tuple())
            for k in base_basis.chars
        )
    return SignalSystem(p, "split", np.vstack(blocks), prov, tori=tori)


def nonsplit_system(p: int) -> SignalSystem:
    """All nonsplit-torus signals via character projectors, torus by torus."""
    tori = enumerate_tori(p, "nonsplit")
    blocks, prov = [], []
    for i, torus in enumerate(tori):
        basis = torus_basis(torus)
        blocks.append(basis.signals)
        prov.extend(
            Provenance("nonsplit-oscillator", i, k, origin=torus.witness.as_tuple())
            for k in basis.chars
        )
    return SignalSystem(p, "nonsplit", np.vstack(blocks), prov, tori=tori)


def oscillator_system(p: int) -> SignalSystem:
    """Union of the split and nonsplit dictionaries with a shared torus registry."""
    split = split_system(p)
    nonsplit = nonsplit_system(p)
    prov = split.provenance + offset_groups(nonsplit.provenance, len(split.tori))
    return SignalSystem(
        p,
        "oscillator",
        np.vstack([split.signals, nonsplit.signals]),
        prov,
        tori=split.tori + nonsplit.tori,
    )


@dataclass
class ExtendedSystem:
    """Time-frequency translates of every base signal, enumerated lazily.

    Iteration yields (signal, provenance) for all p^2 translates of each base
    row; nothing is materialized unless asked.  The (0, 0) translate is the
    base signal itself.
    """

    base: SignalSystem

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def count(self) -> int:
        return len(self.base) * self.p * self.p

    def signal_at(self, base_index: int, tau: int, w: int) -> np.ndarray:
        # plain modulate-after-shift, no half-phase: the (0,0) translate is the base row
        p = self.p
        phi = self.base.signals[base_index]
        t = np.arange(p)
        return psi_table(p)[(w * t) % p] * phi[(t + tau) % p]

    def provenance_at(self, base_index: int, tau: int, w: int) -> Provenance:
        base_prov = self.base.provenance[base_index]
        return Provenance(
            "extended",
            base_prov.group,
            base_prov.char,
            origin=base_prov.origin,
            translate=(tau, w),
            parent=signal_id(base_prov),
        )

    def __iter__(self):
        p = self.p
        for i in range(len(self.base)):
            for tau in range(p):
                for w in range(p):
                    yield self.signal_at(i, tau, w), self.provenance_at(i, tau, w)

    def sample(self, k: int, seed: int = 0) -> tuple[np.ndarray, list[Provenance]]:
        """k distinct translates drawn uniformly, deterministic in the seed."""
        rng = np.random.default_rng(np.random.SeedSequence([seed, self.count]))
        if k > self.count:
            raise ValueError(f"cannot sample {k} distinct signals from {self.count}")
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.update(int(x) for x in rng.integers(0, self.count, size=k - len(chosen)))
        p2 = self.p * self.p
        sigs, provs = [], []
        for flat in sorted(chosen):
            i, rem = divmod(flat, p2)
            tau, w = divmod(rem, self.p)
            sigs.append(self.signal_at(i, tau, w))
            provs.append(self.provenance_at(i, tau, w))
        return np.vstack(sigs), provs

    def materialize(self, limit: int = 200_000) -> SignalSystem:
        if self.count > limit:
            raise ValueError(
                f"extended family has {self.count} signals, over the materialization "
                f"limit {limit}; iterate or sample instead"
            )
        sigs, provs = [], []
        for vec, prov in self:
            sigs.append(vec)
            provs.append(prov)
        return SignalSystem(self.p, "extended", np.vstack(sigs), provs)


def extended_system(base: SignalSystem) -> ExtendedSystem:
    return ExtendedSystem(base)


@dataclass
class ClosureMatch:
    signal: str
    target_group: int
    matched: str | None
    overlap: float


@dataclass
class FourierClosureReport:
    p: int
    family: str
    n_signals: int
    all_matched: bool
    min_overlap: float
    tolerance: float
    matches: list[ClosureMatch]

    @property
    def n_matched(self) -> int:
        return sum(m.matched is not None for m in self.matches)

    def overlaps(self) -> np.ndarray:
        return np.array([m.overlap for m in self.matches])


def fourier_closure_check(system: SignalSystem, tol: float = MATCH_TOL) -> FourierClosureReport:
    """Map every signal through the fourier operator and locate it in the
    dictionary again: the image of the basis of T must be the basis of the
    rotated torus w T w^(-1), signal by signal, up to phases.
    """
    if system.tori is None:
        raise ValueError("fourier closure needs a torus-indexed system")
    p = system.p
    rot = SL2Element.rotation(p)
    key_to_group = {t.key: i for i, t in enumerate(system.tori)}
    groups: dict[int, list[int]] = {}
    for i, pr in enumerate(system.provenance):
        groups.setdefault(pr.group, []).append(i)

    four = fourier_matrix(p)
    matches: list[ClosureMatch] = []
    all_ok = True
    min_overlap = 1.0
    for gidx, members in sorted(groups.items()):
        target = conjugate_torus(system.tori[gidx], rot)
        tgt_group = key_to_group.get(target.key)
        if tgt_group is None:
            all_ok = False
            for i in members:
                matches.append(ClosureMatch(system.ids[i], -1, None, 0.0))
            continue
        tgt_members = groups[tgt_group]
        tgt_block = system.signals[tgt_members]
        images = system.signals[members] @ four.T  # rows are fourier images
        overlaps = np.abs(images @ tgt_block.conj().T)
        for row, i in enumerate(members):
            hits = np.nonzero(overlaps[row] >= 1.0 - tol)[0]
            if len(hits) == 1:
                j = tgt_members[int(hits[0])]
                ov = float(overlaps[row, int(hits[0])])
                matches.append(ClosureMatch(system.ids[i], tgt_group, system.ids[j], ov))
                min_overlap = min(min_overlap, ov)
            else:
                all_ok = False
                best = float(overlaps[row].max()) if overlaps.size else 0.0
                matches.append(ClosureMatch(system.ids[i], tgt_group, None, best))
                min_overlap = min(min_overlap, best)
    return FourierClosureReport(p, system.family, len(system), all_ok, min_overlap, tol, matches)
