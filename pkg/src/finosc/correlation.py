"""Matrix coefficients, ambiguity tables, and the bound checks over them.

The central quantity is

    m(tau, w) = <phi, op(tau, w, 0) other> = sum_t phi(t) conj((op other)(t))

with op the Heisenberg operator and the inner product linear in the first
slot.  Its magnitude does not depend on the central coordinate z.  Tables
are computed a full p x p grid at a time: row tau is a DFT of the
pointwise product phi(t) conj(other(t + tau)), so one table costs
O(p^2 log p) via the FFT, here realized as a dense multiply against the
cached DFT matrix at desk scale.

verify_bounds applies the family policy to the raw statistics:

    oscillator-style families: off-peak auto <= 2/sqrt(p),
        cross <= 4/sqrt(p), peak magnitude <= 2/sqrt(p)
    heisenberg: auto tables are exactly 0/1 with support on the signal's own
        line; distinct-line cross <= 1/sqrt(p); same-line cross is the
        characteristic function of a translated line; peak magnitude is
        exactly 1/sqrt(p) off the delta line.

stability_check reuses the same statistics against one caller-chosen level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from types import SimpleNamespace

import numpy as np

from .field import psi_table, require_odd_prime
from .systems import SignalSystem

DEFAULT_TOL = 1e-9
DEFAULT_PAIR_BUDGET = 200_000
_CHUNK = 1024


@lru_cache(maxsize=None)
def _plan(p: int) -> SimpleNamespace:
    require_odd_prime(p)
    psi = psi_table(p)
    t = np.arange(p)
    shift_idx = (t[None, :] + t[:, None]) % p  # [tau, t] -> t + tau
    dft = np.conj(psi[np.outer(t, t) % p])  # [t, w] -> exp(-2 pi i w t / p)
    half = (p + 1) // 2
    phase = np.conj(psi[(half * np.outer(t, t)) % p])  # [tau, w] -> conj psi(tau w / 2)
    for arr in (shift_idx, dft, phase):
        arr.flags.writeable = False
    return SimpleNamespace(shift_idx=shift_idx, dft=dft, phase=phase)


def matrix_coefficient(
    phi: np.ndarray, other: np.ndarray, tau: int, w: int, p: int, z: int = 0
) -> complex:
    """<phi, op(tau, w, z) other> at a single grid point."""
    psi = psi_table(p)
    half = (p + 1) // 2
    t = np.arange(p)
    moved = psi[((half * tau * w + z) % p + w * t) % p] * other[(t + tau) % p]
    return complex(np.sum(phi * np.conj(moved)))


def cross_ambiguity(phi: np.ndarray, other: np.ndarray, p: int) -> np.ndarray:
    """Full table of <phi, op(tau, w, 0) other> indexed [tau, w]."""
    plan = _plan(p)
    prod = phi[None, :] * np.conj(other[plan.shift_idx])
    return (prod @ plan.dft) * plan.phase


@dataclass
class AmbiguityTable:
    p: int
    values: np.ndarray  # (p, p) complex, [tau, w]
    owner: str | None = None

    def magnitudes(self) -> np.ndarray:
        return np.abs(self.values)

    def offpeak_max(self) -> float:
        mags = self.magnitudes().copy()
        mags[0, 0] = 0.0
        return float(mags.max())


def ambiguity_table(phi: np.ndarray, p: int, owner: str | None = None) -> AmbiguityTable:
    return AmbiguityTable(p, cross_ambiguity(phi, phi, p), owner)


def papr(phi: np.ndarray, p: int | None = None) -> tuple[float, float]:
    """(peak magnitude, peak-to-average power ratio p * peak^2) of a unit signal."""
    peak = float(np.abs(phi).max())
    n = len(phi) if p is None else p
    return peak, n * peak * peak


def _batch_tables_abs(left: np.ndarray, right: np.ndarray, p: int) -> np.ndarray:
    """|cross tables| for aligned rows of left/right; phase factor dropped (unimodular)."""
    plan = _plan(p)
    shifted = right[:, plan.shift_idx]  # (n, p, p)
    prod = left[:, None, :] * np.conj(shifted)
    return np.abs(prod @ plan.dft)


def batch_auto_stats(signals: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """(off-peak max, peak deviation from 1) per signal, chunked."""
    n = signals.shape[0]
    offpeak = np.empty(n)
    peak_dev = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        tabs = _batch_tables_abs(signals[lo:hi], signals[lo:hi], p)
        peak_dev[lo:hi] = np.abs(tabs[:, 0, 0] - 1.0)
        tabs[:, 0, 0] = 0.0
        offpeak[lo:hi] = tabs.max(axis=(1, 2))
    return offpeak, peak_dev


def batch_cross_max(left: np.ndarray, right: np.ndarray, p: int) -> np.ndarray:
    """Max |cross table| for each aligned row pair, chunked."""
    n = left.shape[0]
    out = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        out[lo:hi] = _batch_tables_abs(left[lo:hi], right[lo:hi], p).max(axis=(1, 2))
    return out


def select_pairs(n: int, budget: int, seed: int) -> tuple[np.ndarray, np.ndarray, bool]:
    """All unordered index pairs when they fit the budget, else a seeded sample.

    Returns (ii, jj, sampled).  Sampling is uniform over distinct pairs.
    """
    total = n * (n - 1) // 2
    if total <= budget:
        ii, jj = np.triu_indices(n, k=1)
        return ii, jj, False
    rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
    if n <= 4096:
        ii, jj = np.triu_indices(n, k=1)
        pick = rng.choice(total, size=budget, replace=False)
        return ii[pick], jj[pick], True
    # huge systems: draw with negligible collision probability, then dedup
    seen: set[tuple[int, int]] = set()
    while len(seen) < budget:
        draw = rng.integers(0, n, size=(budget - len(seen) + 16, 2))
        for a, b in draw:
            if a == b:
                continue
            pair = (int(min(a, b)), int(max(a, b)))
            seen.add(pair)
            if len(seen) == budget:
                break
    pairs = np.array(sorted(seen))
    return pairs[:, 0], pairs[:, 1], True


@dataclass
class PairStats:
    n_total: int
    n_checked: int
    sampled: bool
    max_value: float
    quantiles: dict[str, float]
    worst: list[tuple[str, str, float]]


def _pair_stats(
    system: SignalSystem, ii, jj, sampled: bool, n_total: int | None = None, keep_worst: int = 10
) -> PairStats:
    values = batch_cross_max(system.signals[ii], system.signals[jj], system.p)
    order = np.argsort(values)[::-1][:keep_worst]
    worst = [(system.ids[int(ii[k])], system.ids[int(jj[k])], float(values[k])) for k in order]
    qs = {f"q{int(q * 100):02d}": float(np.quantile(values, q)) for q in (0.5, 0.9, 0.99)}
    if n_total is None:
        n_total = len(system) * (len(system) - 1) // 2
    return PairStats(n_total, len(values), sampled, float(values.max()), qs, worst)


@dataclass
class BoundReport:
    p: int
    family: str
    n_signals: int
    tolerance: float
    seed: int
    auto_bound: float
    auto_max: float
    auto_per_signal: np.ndarray = field(repr=False)
    auto_pass: bool
    sup_bound: float
    sup_max: float
    sup_per_signal: np.ndarray = field(repr=False)
    papr_per_signal: np.ndarray = field(repr=False)
    sup_pass: bool
    cross_bound: float
    cross: PairStats
    cross_pass: bool
    passed: bool
    notes: list[str]
    thumbtack_auto_pass: bool | None = None

    def summary_lines(self) -> list[str]:
        flag = lambda ok: "pass" if ok else "FAIL"
        lines = [
            f"family={self.family} p={self.p} signals={self.n_signals}",
            f"auto   off-peak max {self.auto_max:.6f} vs {self.auto_bound:.6f}  [{flag(self.auto_pass)}]",
            f"peak   magnitude max {self.sup_max:.6f} vs {self.sup_bound:.6f}  [{flag(self.sup_pass)}]",
            f"cross  max {self.cross.max_value:.6f} vs {self.cross_bound:.6f} over "
            f"{self.cross.n_checked}/{self.cross.n_total} pairs"
            f"{' (sampled)' if self.cross.sampled else ''}  [{flag(self.cross_pass)}]",
            f"overall: {flag(self.passed)}",
        ]
        lines.extend(f"note: {n}" for n in self.notes)
        return lines


def _heisenberg_checks(system: SignalSystem, tol: float) -> tuple[bool, bool, bool, list[str]]:
    """(auto line patterns ok, same-line cross patterns ok, delta-line seen, notes)."""
    p = system.p
    masks = {}
    for g, line in enumerate(system.lines):
        mask = np.zeros((p, p), dtype=bool)
        for a, b in line.points:
            mask[a, b] = True
        masks[g] = mask
    auto_ok = True
    for i in range(len(system)):
        mags = np.abs(cross_ambiguity(system.signals[i], system.signals[i], p))
        binary = np.all((mags <= tol) | (np.abs(mags - 1.0) <= tol))
        support_ok = np.array_equal(mags > 0.5, masks[system.provenance[i].group])
        if not (binary and support_ok):
            auto_ok = False
    same_ok = True
    groups = [pr.group for pr in system.provenance]
    for i in range(len(system)):
        for j in range(i + 1, len(system)):
            if groups[i] != groups[j]:
                continue
            mags = np.abs(cross_ambiguity(system.signals[i], system.signals[j], p))
            ones = mags > 0.5
            if not np.all((mags <= tol) | (np.abs(mags - 1.0) <= tol)) or ones.sum() != p:
                same_ok = False
                continue
            a0, b0 = np.argwhere(ones)[0]
            expect = np.zeros((p, p), dtype=bool)
            for a, b in system.lines[groups[i]].points:
                expect[(a0 + a) % p, (b0 + b) % p] = True
            if not np.array_equal(ones, expect):
                same_ok = False
    notes = ["auto tables checked as exact line patterns, not against the thumbtack bound"]
    return auto_ok, same_ok, True, notes


def verify_bounds(
    system: SignalSystem,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    tolerance: float = DEFAULT_TOL,
    seed: int = 0,
) -> BoundReport:
    p = system.p
    sqp = math.sqrt(p)
    offpeak, peak_dev = batch_auto_stats(system.signals, system.p)
    sup = np.abs(system.signals).max(axis=1)
    paprs = p * sup * sup
    notes: list[str] = []
    if peak_dev.max() > tolerance:
        notes.append(f"auto peak deviates from 1 by {peak_dev.max():g}")

    ii, jj, sampled = select_pairs(len(system), pair_budget, seed)

    thumbtack_auto = bool(offpeak.max() <= 2.0 / sqp + tolerance)

    if system.family == "heisenberg":
        auto_ok, same_ok, _, extra = _heisenberg_checks(system, tolerance)
        notes.extend(extra)
        # same-line pairs are pattern-checked above; the numeric bound is for
        # distinct lines only, so restrict the pair statistics to those
        distinct = np.array(
            [system.provenance[a].group != system.provenance[b].group for a, b in zip(ii, jj)]
        )
        cross = _pair_stats(system, ii[distinct], jj[distinct], sampled, n_total=int(distinct.sum()))
        cross_bound = 1.0 / sqp
        cross_ok = bool(cross.max_value <= cross_bound + tolerance) and same_ok
        if not same_ok:
            notes.append("a same-line pair broke the translated-line pattern")
        delta_line = len(system.lines) - 1  # direction (0, 1): the delta basis
        off_delta = np.array([pr.group != delta_line for pr in system.provenance])
        sup_bound = 1.0 / sqp
        sup_ok = bool(np.max(np.abs(sup[off_delta] - sup_bound)) <= tolerance)
        notes.append("peak equality checked off the delta line only")
        report_auto_bound, auto_ok_final = 1.0, auto_ok
        sup_max = float(sup[off_delta].max())
    else:
        cross = _pair_stats(system, ii, jj, sampled)
        report_auto_bound = 2.0 / sqp
        auto_ok_final = bool(offpeak.max() <= report_auto_bound + tolerance)
        if not auto_ok_final and offpeak.max() <= 2.0 * sqp / (p - 1) + tolerance:
            # the 2/sqrt(p) target is the asymptotic constant; the exact
            # finite-p sum bound is 2*sqrt(p)/(p-1), and split-family signals
            # land between the two at small p
            notes.append(
                f"auto max {offpeak.max():.6f} exceeds 2/sqrt(p) but fits the "
                f"finite-p level 2*sqrt(p)/(p-1) = {2.0 * sqp / (p - 1):.6f}"
            )
        cross_bound = 4.0 / sqp
        cross_ok = bool(cross.max_value <= cross_bound + tolerance)
        sup_bound = 2.0 / sqp
        sup_ok = bool(sup.max() <= sup_bound + tolerance)
        sup_max = float(sup.max())
        if not sup_ok and sup_max <= 2.0 / math.sqrt(p - 1) + tolerance:
            # same asymptotic-vs-exact gap as above: two weight-sqrt(p) terms
            # on a vector normalized over p-1 support points give 2/sqrt(p-1)
            notes.append(
                f"sup max {sup_max:.6f} exceeds 2/sqrt(p) but fits the "
                f"finite-p level 2/sqrt(p-1) = {2.0 / math.sqrt(p - 1):.6f}"
            )

    passed = bool(auto_ok_final and cross_ok and sup_ok and peak_dev.max() <= tolerance)
    return BoundReport(
        p=p,
        family=system.family,
        n_signals=len(system),
        tolerance=tolerance,
        seed=seed,
        auto_bound=report_auto_bound,
        auto_max=float(offpeak.max()),
        auto_per_signal=offpeak,
        auto_pass=auto_ok_final,
        sup_bound=sup_bound,
        sup_max=sup_max,
        sup_per_signal=sup,
        papr_per_signal=paprs,
        sup_pass=sup_ok,
        cross_bound=cross_bound,
        cross=cross,
        cross_pass=cross_ok,
        passed=passed,
        notes=notes,
        thumbtack_auto_pass=thumbtack_auto,
    )


@dataclass
class StabilityReport:
    p: int
    family: str
    epsilon: float
    auto_max: float
    cross_max: float
    pairs_checked: int
    sampled: bool
    stable: bool


def stability_check(
    system: SignalSystem,
    epsilon: float,
    pair_budget: int = DEFAULT_PAIR_BUDGET,
    seed: int = 0,
) -> StabilityReport:
    """Is every auto table epsilon-flat off the peak and every pair epsilon-separated?"""
    offpeak, _ = batch_auto_stats(system.signals, system.p)
    ii, jj, sampled = select_pairs(len(system), pair_budget, seed)
    cross = batch_cross_max(system.signals[ii], system.signals[jj], system.p)
    cross_max = float(cross.max()) if len(cross) else 0.0
    return StabilityReport(
        p=system.p,
        family=system.family,
        epsilon=epsilon,
        auto_max=float(offpeak.max()),
        cross_max=cross_max,
        pairs_checked=len(cross),
        sampled=sampled,
        stable=bool(offpeak.max() <= epsilon and cross_max <= epsilon),
    )


@dataclass
class ExtendedPairReport:
    p: int
    bound: float
    n_pairs: int
    max_value: float
    quantiles: dict[str, float]
    passed: bool


def verify_extended(
    ext, n_pairs: int = 20_000, tolerance: float = DEFAULT_TOL, seed: int = 0
) -> ExtendedPairReport:
    """Sampled plain inner products across distinct extended signals vs 4/sqrt(p).

    Auto-ambiguity and peak statistics of a translate coincide with those of
    its base signal, so only the pairwise claim needs fresh evidence here.
    """
    p = ext.p
    rng = np.random.default_rng(np.random.SeedSequence([seed, 0xE7]))
    count = ext.count
    p2 = p * p
    vals = np.empty(n_pairs)
    got = 0
    while got < n_pairs:
        a, b = (int(x) for x in rng.integers(0, count, size=2))
        if a == b:
            continue
        ia, ra = divmod(a, p2)
        ib, rb = divmod(b, p2)
        va = ext.signal_at(ia, *divmod(ra, p))
        vb = ext.signal_at(ib, *divmod(rb, p))
        vals[got] = abs(np.sum(va * np.conj(vb)))
        got += 1
    bound = 4.0 / math.sqrt(p)
    qs = {f"q{int(q * 100):02d}": float(np.quantile(vals, q)) for q in (0.5, 0.9, 0.99)}
    return ExtendedPairReport(
        p=p,
        bound=bound,
        n_pairs=n_pairs,
        max_value=float(vals.max()),
        quantiles=qs,
        passed=bool(vals.max() <= bound + tolerance),
    )
