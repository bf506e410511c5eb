import numpy as np
import pytest

from finosc.field import legendre
from finosc.oscillator import (
    character_projector,
    extended_system,
    fourier_closure_check,
    nonsplit_system,
    oscillator_system,
    split_system,
    torus_basis,
)
from finosc.sl2 import (
    enumerate_tori,
    nonsplit_standard_torus,
    standard_torus,
)
from finosc.weil import weil_operator


def expected_counts(p):
    split = (p - 2) * p * (p + 1) // 2
    nonsplit = p * p * (p - 1) // 2
    return split, nonsplit


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_system_counts(p, built):
    ns, nn = expected_counts(p)
    assert built("split", p).signals.shape == (ns, p)
    assert built("nonsplit", p).signals.shape == (nn, p)
    both = built("oscillator", p)
    assert both.signals.shape == (ns + nn, p)
    assert len(set(both.ids)) == ns + nn


def test_counts_pinned():
    # 287 = 5*7*8/2 + 49*6/2 and 2015 = 11*13*14/2 + 169*12/2
    s7, n7 = expected_counts(7)
    assert s7 + n7 == 287
    s13, n13 = expected_counts(13)
    assert s13 + n13 == 2015


@pytest.mark.parametrize("p", [5, 7, 11])
def test_split_rank_census(p):
    # the quadratic character carries rank 2 (two eigenvalue labels collide
    # there); every other character, the trivial one included, has rank 1
    basis = torus_basis(standard_torus(p))
    ranks = basis.ranks
    assert sum(ranks) == p
    assert len(ranks) == p - 1
    assert ranks[(p - 1) // 2] == 2
    assert ranks.count(1) == p - 2
    assert ranks.count(0) == 0
    assert basis.chars == [k for k in range(p - 1) if k != (p - 1) // 2]


@pytest.mark.parametrize("p", [5, 7, 11])
def test_nonsplit_rank_census(p):
    # exactly one character disappears (rank 0); which index it lands on
    # depends on the generator the enumeration picked, so test the census
    basis = torus_basis(nonsplit_standard_torus(p))
    ranks = basis.ranks
    assert sum(ranks) == p
    assert len(ranks) == p + 1
    assert ranks.count(0) == 1
    assert ranks.count(1) == p
    assert basis.chars == [k for k, r in enumerate(ranks) if r == 1]


@pytest.mark.parametrize("p", [5, 7, 11])
def test_basis_rows_are_torus_eigenvectors(p):
    # independent oracle: multiply by each dense torus operator and verify
    # the row is fixed up to a unimodular scalar
    for torus in [standard_torus(p), nonsplit_standard_torus(p)]:
        basis = torus_basis(torus)
        for g in torus.elements:
            m = weil_operator(g).matrix
            out = (m @ basis.signals.T).T
            lam = np.sum(np.conj(basis.signals) * out, axis=1)
            assert np.allclose(np.abs(lam), 1.0, atol=1e-9)
            assert np.allclose(out, lam[:, None] * basis.signals, atol=1e-9)


@pytest.mark.parametrize("p", [5, 7])
def test_eigenvalues_follow_characters(p):
    # on the standard split torus the eigenvalue of diag(a, 1/a) on the row
    # kept for character index k is exactly chi_k(a)
    from finosc.field import dlog_table

    torus = standard_torus(p)
    basis = torus_basis(torus)
    dlog = dlog_table(p)
    root = np.exp(2j * np.pi / (p - 1))
    for g in torus.elements:
        m = weil_operator(g).matrix
        out = (m @ basis.signals.T).T
        lam = np.sum(np.conj(basis.signals) * out, axis=1)
        for row, k in enumerate(basis.chars):
            chi_a = root ** ((k * dlog[g.a]) % (p - 1))
            assert lam[row] == pytest.approx(chi_a, abs=1e-9)


def test_character_projector_matches_basis():
    p = 7
    torus = standard_torus(p)
    basis = torus_basis(torus)
    for row, k in enumerate(basis.chars):
        proj = character_projector(torus, k)
        v = basis.signals[row]
        # v spans the image of the rank-one projector
        assert np.allclose(proj @ v, v, atol=1e-10)
        assert np.trace(proj) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_per_torus_orthonormality(p, built):
    for family in ("split", "nonsplit"):
        sys = built(family, p)
        for gidx in range(len(sys.tori)):
            block = sys.signals[sys.group_indices(gidx)]
            gram = block @ block.conj().T
            assert np.allclose(gram, np.eye(len(block)), atol=1e-9)


@pytest.mark.parametrize("p", [5, 7])
def test_transport_agrees_with_projectors(p, built):
    # split systems ride the Bruhat transport fast path; recompute a few tori
    # through the projector route and demand the same vectors up to phase
    sys = built("split", p)
    tori = enumerate_tori(p, "split")
    for gidx in [0, len(tori) // 2, len(tori) - 1]:
        block = sys.signals[sys.group_indices(gidx)]
        slow = torus_basis(tori[gidx]).signals
        overlap = np.abs(block @ slow.conj().T)
        # same spans row for row: overlap matrix is a permutation matrix
        assert np.allclose(np.sort(overlap.max(axis=1)), 1.0, atol=1e-8)
        assert np.allclose(overlap.sum(axis=1), overlap.max(axis=1), atol=1e-8)


@pytest.mark.parametrize("p", [5, 7, 11])
def test_unit_norms_and_ids(p, built):
    for family in ("split", "nonsplit"):
        sys = built(family, p)
        norms = np.linalg.norm(sys.signals, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-10)
        assert len(sys.ids) == len(set(sys.ids))
        for i, pr in enumerate(sys.provenance):
            assert sys.index_of(sys.ids[i]) == i
            assert pr.family == f"{family}-oscillator"


@pytest.mark.parametrize("p", [5, 7, 11])
@pytest.mark.parametrize("family", ["split", "nonsplit"])
def test_fourier_closure_exact(p, family, built):
    report = fourier_closure_check(built(family, p))
    assert report.all_matched
    assert report.n_matched == report.n_signals
    assert report.min_overlap == pytest.approx(1.0, abs=1e-9)


def test_extended_counts(built):
    p = 7
    base = built("split", p)
    ext = extended_system(base)
    assert ext.p == p
    assert ext.count == p * p * len(base.signals)


def test_extended_signal_at_matches_translation():
    # plain modulate-after-shift: psi(w t) phi(t + tau), no center phase, so
    # it agrees with the group operator at z = -tau w / 2
    from finosc.field import psi_table
    from finosc.heisenberg import heisenberg_apply

    p = 5
    half = (p + 1) // 2
    base = split_system(p)
    ext = extended_system(base)
    t = np.arange(p)
    for bi in [0, 3, len(base.signals) - 1]:
        phi = base.signals[bi]
        for tau, w in [(0, 0), (1, 0), (0, 1), (2, 3), (4, 4)]:
            got = ext.signal_at(bi, tau, w)
            want = psi_table(p)[(w * t) % p] * phi[(t + tau) % p]
            assert np.allclose(got, want, atol=1e-12)
            z = (-half * tau * w) % p
            assert np.allclose(got, heisenberg_apply(phi, tau, w, z, p), atol=1e-12)
    assert np.allclose(ext.signal_at(0, 0, 0), base.signals[0], atol=0)


def test_extended_sample_deterministic():
    p = 7
    ext = extended_system(split_system(p))
    s1, prov1 = ext.sample(25, seed=11)
    s2, prov2 = ext.sample(25, seed=11)
    assert np.array_equal(s1, s2)
    assert [(q.translate, q.parent) for q in prov1] == [
        (q.translate, q.parent) for q in prov2
    ]
    s3, _ = ext.sample(25, seed=12)
    assert not np.array_equal(s1, s3)


def test_extended_materialize_cap():
    p = 13
    ext = extended_system(oscillator_system(p))
    assert ext.count == 13 * 13 * 2015  # 340535 > default cap
    with pytest.raises(ValueError):
        ext.materialize()
    small = extended_system(split_system(5)).materialize()
    assert small.signals.shape == (25 * len(split_system(5).signals), 5)


def test_split_rank_two_space_is_delta_plus_uniform():
    # the doubled character space on the standard torus is spanned by the
    # mass at zero and the flat vector
    p = 7
    torus = standard_torus(p)
    proj = character_projector(torus, (p - 1) // 2)
    assert np.trace(proj).real == pytest.approx(2.0, abs=1e-9)
    delta0 = np.zeros(p, dtype=np.complex128)
    delta0[0] = 1.0
    flat = np.full(p, 1.0 / np.sqrt(p), dtype=np.complex128)
    for v in (delta0, flat):
        assert np.allclose(proj @ v, v, atol=1e-9)
