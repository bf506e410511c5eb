"""Acceptance gates for the whole toolkit, one test per criterion.

Each test prints a single PASS/FAIL line (run pytest with -s or -rA to see
them all) and then asserts the literal criterion. Two criteria are known to
fail at specific primes because the asymptotic 2/sqrt(p) levels are not yet
available at desk-scale p; those tests fail honestly rather than loosening
the threshold. The worst offenders always sit within the exact finite-p
levels (2*sqrt(p)/(p-1) for off-peak auto-correlation, 2/sqrt(p-1) for the
amplitude supremum), which is reported in the printed line.
"""

import math
import time

import numpy as np
import pytest

from finosc.applications import CdmaScenario, RadarScenario, cdma_simulate, radar_estimate, radar_simulate, random_codebook
from finosc.correlation import batch_auto_stats, batch_cross_max, cross_ambiguity, select_pairs
from finosc.heisenberg import heisenberg_apply
from finosc.oscillator import extended_system, fourier_closure_check, split_system, torus_basis
from finosc.sl2 import enumerate_tori, sp_elements, torus_representatives
from finosc.weil import weil_operator

TOL = 1e-9


def emit(num, ok, detail):
    print(f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} {detail}")


def test_criterion_01_heisenberg_exactness(built):
    worst = 0.0
    for p in (5, 7, 11):
        sys = built("heisenberg", p)
        for i in range(len(sys)):
            mags = np.abs(cross_ambiguity(sys.signals[i], sys.signals[i], p))
            line = sys.lines[sys.provenance[i].group]
            mask = np.zeros((p, p), dtype=bool)
            for a, b in line.points:
                mask[a, b] = True
            dev = float(np.max(np.abs(mags - mask.astype(float))))
            worst = max(worst, dev)
    ok = worst <= TOL
    emit(1, ok, f"line tables binary with exact line support, max deviation {worst:.3e}")
    assert ok


def test_criterion_02_heisenberg_cross(built):
    worst_cross = 0.0
    pattern_ok = True
    for p in (5, 7, 11):
        sys = built("heisenberg", p)
        groups = [pr.group for pr in sys.provenance]
        bound = 1 / math.sqrt(p)
        for i in range(len(sys)):
            for j in range(i + 1, len(sys)):
                mags = np.abs(cross_ambiguity(sys.signals[i], sys.signals[j], p))
                if groups[i] != groups[j]:
                    worst_cross = max(worst_cross, float(np.max(mags)) - bound)
                else:
                    ones = mags > 0.5
                    binary = bool(np.all((mags <= TOL) | (np.abs(mags - 1.0) <= TOL)))
                    if not binary or int(ones.sum()) != p:
                        pattern_ok = False
                        continue
                    a0, b0 = map(int, np.argwhere(ones)[0])
                    want = np.zeros((p, p), dtype=bool)
                    for a, b in sys.lines[groups[i]].points:
                        want[(a0 + a) % p, (b0 + b) % p] = True
                    if not np.array_equal(ones, want):
                        pattern_ok = False
    ok = worst_cross <= TOL and pattern_ok
    emit(
        2,
        ok,
        f"distinct-line cross within 1/sqrt(p) (worst excess {worst_cross:.3e}), "
        f"same-line tables are translated lines: {pattern_ok}",
    )
    assert ok


def test_criterion_03_oscillator_auto(built):
    details = []
    ok = True
    for p in (5, 7, 11, 13):
        sys = built("oscillator", p)
        offpeak, peak_dev = batch_auto_stats(sys.signals, p)
        bound = 2 / math.sqrt(p)
        this = bool(peak_dev.max() <= TOL and offpeak.max() <= bound + TOL)
        ok = ok and this
        details.append(
            f"p={p} max {offpeak.max():.5f} vs 2/sqrt(p) {bound:.5f}"
            + ("" if this else f" EXCEEDED (finite-p level {2 * math.sqrt(p) / (p - 1):.5f})")
        )
    emit(3, ok, "off-peak auto-correlation: " + "; ".join(details))
    assert ok  # known honest failure at p in {7, 13}


def test_criterion_04_oscillator_cross(built):
    ok = True
    details = []
    for p, minimum in ((5, None), (7, None), (11, 100_000), (13, 100_000)):
        sys = built("oscillator", p)
        n = len(sys)
        budget = n * (n - 1) // 2 if minimum is None else minimum
        ii, jj, sampled = select_pairs(n, budget, seed=0)
        if minimum is not None:
            assert len(ii) >= minimum
        worst = 0.0
        for k in range(0, len(ii), 2048):
            vals = batch_cross_max(sys.signals[ii[k : k + 2048]], sys.signals[jj[k : k + 2048]], p)
            worst = max(worst, float(vals.max()))
        bound = 4 / math.sqrt(p)
        this = worst <= bound + TOL
        ok = ok and this
        details.append(
            f"p={p} {'all' if minimum is None else 'sampled'} {len(ii)} pairs max {worst:.5f} < {bound:.5f}"
        )
    emit(4, ok, "cross-correlation: " + "; ".join(details))
    assert ok


def test_criterion_05_supremum(built):
    ok = True
    details = []
    for p in (5, 7, 11, 13):
        sys = built("oscillator", p)
        sup = np.abs(sys.signals).max(axis=1)
        bound = 2 / math.sqrt(p)
        this = bool(sup.max() <= bound + TOL)
        ok = ok and this
        details.append(
            f"p={p} max {sup.max():.5f} vs {bound:.5f}"
            + ("" if this else f" EXCEEDED (finite-p level {2 / math.sqrt(p - 1):.5f})")
        )
        # rows of the standard-torus basis peak at exactly 1/sqrt(p-1)
        split = built("split", p)
        base = [
            i
            for i, pr in enumerate(split.provenance)
            if pr.origin == (1, 0, 0, 1)
        ]
        assert base, "standard torus missing from the split registry"
        base_sup = np.abs(split.signals[base]).max(axis=1)
        flat = bool(np.max(np.abs(base_sup - 1 / math.sqrt(p - 1))) <= TOL)
        ok = ok and flat
        if not flat:
            details.append(f"p={p} standard-basis peak off 1/sqrt(p-1)")
    emit(5, ok, "amplitude supremum: " + "; ".join(details))
    assert ok  # known honest failure at p = 11


def test_criterion_06_fourier_closure(built):
    ok = True
    worst = 1.0
    for p in (5, 7, 11):
        for family in ("split", "nonsplit"):
            rep = fourier_closure_check(built(family, p), tol=1e-6)
            ok = ok and rep.all_matched
            worst = min(worst, rep.min_overlap)
    emit(6, ok, f"every spectrum matched in the predicted conjugate basis, min overlap {worst:.9f}")
    assert ok


def test_criterion_07_counts(built):
    ok = True
    details = []
    for p in (5, 7, 11, 13):
        reps = len(torus_representatives(p))
        split = len(built("split", p))
        hei = len(built("heisenberg", p))
        ok = ok and reps == p * (p + 1) // 2
        ok = ok and split == (p - 2) * p * (p + 1) // 2
        ok = ok and hei == p * (p + 1)
    details.append(f"split tori/system/heisenberg counts match at p in (5,7,11,13)")
    assert len(built("split", 5)) == 45
    assert len(built("split", 7)) == 140
    for p in (5, 7):
        ext = extended_system(built("oscillator", p))
        lazy = sum(1 for _ in ext)
        ok = ok and lazy == p * p * len(built("oscillator", p)) == ext.count
        details.append(f"p={p} lazy extended count {lazy}")
    emit(7, ok, "; ".join(details))
    assert ok


def _best_phase_gap(prod, target):
    idx = np.unravel_index(int(np.argmax(np.abs(target))), target.shape)
    lam = prod[idx] / target[idx]
    if abs(abs(lam) - 1.0) > 1e-6:
        return float("inf")
    return float(np.max(np.abs(prod - lam * target)))


def test_criterion_08_projective_property():
    worst = 0.0
    # exhaustive at p = 3
    els3 = sp_elements(3)
    mats3 = [weil_operator(g).matrix for g in els3]
    for a, g in enumerate(els3):
        for b, h in enumerate(els3):
            k = els3.index(g * h)
            worst = max(worst, _best_phase_gap(mats3[a] @ mats3[b], mats3[k]))
    # sampled pairs elsewhere
    for p in (5, 7, 11):
        els = sp_elements(p)
        index = {g.as_tuple(): i for i, g in enumerate(els)}
        mats = [weil_operator(g).matrix for g in els]
        rng = np.random.default_rng(np.random.SeedSequence([0xACCE, p]))
        pairs = rng.integers(0, len(els), size=(10_000, 2))
        for a, b in pairs:
            prod = mats[a] @ mats[b]
            target = mats[index[(els[a] * els[b]).as_tuple()]]
            worst = max(worst, _best_phase_gap(prod, target))
    ok = worst <= TOL
    emit(8, ok, f"operator products projective over 576 + 3x10000 pairs, worst gap {worst:.3e}")
    assert ok


def test_criterion_09_transport_vs_projector_oracle(built):
    worst = 1.0
    ok = True
    for p in (5, 7):
        sys = built("split", p)
        tori = enumerate_tori(p, "split")
        for gidx, torus in enumerate(tori):
            fast = sys.signals[sys.group_indices(gidx)]
            slow = torus_basis(torus).signals
            overlap = np.abs(fast @ slow.conj().T)
            best = overlap.max(axis=1)
            worst = min(worst, float(best.min()))
            # bijective identification: each fast row claims its own slow row
            claimed = overlap.argmax(axis=1)
            ok = ok and len(set(claimed.tolist())) == len(claimed)
            ok = ok and bool(best.min() >= 1 - 1e-6)
    emit(9, ok, f"transported bases match projector-built bases one-to-one, min overlap {worst:.9f}")
    assert ok


def test_criterion_10_radar(built):
    p = 13
    report = radar_simulate(
        RadarScenario(p=p, n_signals=10, shift=None, snr_db=None, trials=1, seed=0),
        system=built("oscillator", p),
    )
    const = np.full(p, 1 / math.sqrt(p), dtype=np.complex128)
    echo = heisenberg_apply(const, 3, 0, 0, p)
    degenerate = radar_estimate(const, echo, p)
    ok = report.success_rate == 1.0 and report.n_trials == 10 * p * p and degenerate.ambiguous
    emit(
        10,
        ok,
        f"noiseless recovery {report.success_rate:.3f} over {report.n_trials} shift trials, "
        f"constant signal flagged ambiguous: {degenerate.ambiguous}",
    )
    assert ok


def test_criterion_11_cdma(built):
    p, users, trials = 13, 4, 2000
    sys = built("oscillator", p)
    scen = CdmaScenario(p=p, n_users=users, scenario="full", snr_db=None, trials=trials, seed=0)
    osc = cdma_simulate(scen, system=sys)
    book = random_codebook(p, len(sys), seed=0)
    rnd = cdma_simulate(scen, codebook=book, codebook_label="random")
    sync = cdma_simulate(
        CdmaScenario(p=p, n_users=users, scenario="sync", snr_db=None, trials=trials, seed=0),
        system=sys,
    )
    bound = (users - 1) * 4 / math.sqrt(p) + TOL
    ok = osc.ser < rnd.ser and sync.max_decode_error <= bound
    emit(
        11,
        ok,
        f"oscillator SER {osc.ser:.4f} < random SER {rnd.ser:.4f} over {trials} paired trials; "
        f"sync interference max {sync.max_decode_error:.4f} within {bound:.4f}",
    )
    assert ok


def test_criterion_12_complexity_trend():
    primes = (7, 11, 13, 17)
    split_system(primes[0])  # warm the caches once
    times = []
    for p in primes:
        best = float("inf")
        for _ in range(3):
            t0 = time.perf_counter()
            split_system(p)
            best = min(best, time.perf_counter() - t0)
        times.append(best)
    logs = np.log(np.array(primes, dtype=float))
    measured = float(np.polyfit(logs, np.log(times), 1)[0])
    theory = float(np.polyfit(logs, np.log([p**4 * math.log(p) for p in primes]), 1)[0])
    ok = theory / 3 <= measured <= theory * 3
    emit(
        12,
        ok,
        f"generation-time log-log slope {measured:.2f} vs predicted {theory:.2f} "
        f"(window [{theory / 3:.2f}, {theory * 3:.2f}])",
    )
    assert ok
