import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import chisquare

from mubforge import catalog
from mubforge.analysis import (
    MUVectorSet, Triplet, canonicalize, classify_orbits, collect, dita_alphabets, displacement,
    extend_triplet, fourier_alphabets, is_eigenvector, match_algebraic, orbit, pair_permutations,
    same_basis, search, shift_operator, stabilizing_displacements, third_bases, triplet_classes,
    xz_eigenbases,
)
from mubforge.linalg import hadamard_basis, mu_deviation
from mubforge.solver import SolverConfig, mu_distance
from helpers import lsq_mu_vector
from oracles import H1, H2, V1, V2, V3


def test_canonicalize_idempotent():
    rng = np.random.default_rng(0)
    v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
    c = canonicalize(v)
    assert np.allclose(canonicalize(c), c, atol=1e-15)
    assert abs(c[0].imag) <= 1e-16 and c[0].real > 0
    z = canonicalize([0, 1j, 1])
    assert z[1] > 0


def test_vector_set_dedup_and_merge():
    pair = (np.eye(2), hadamard_basis(catalog.fourier(2)))
    a = MUVectorSet.empty(pair)
    b = MUVectorSet.empty(pair)
    u = np.array([1, 1j]) / np.sqrt(2)
    w = np.array([1, -1j]) / np.sqrt(2)
    assert a.add(u) and not a.add(np.exp(0.4j) * u)
    b.add(w, 3)
    b.add(u)
    ab, ba = a.merge(b), b.merge(a)
    assert len(ab) == len(ba) == 2
    assert sorted(ab.hits) == sorted(ba.hits) == [3, 3]


def test_collect_d2_analytic():
    # the only states MU to {I, F2} are (1, +-i)/sqrt(2)
    pair = (np.eye(2), hadamard_basis(catalog.fourier(2)))
    vs = collect(pair, 500, SolverConfig(rng_seed=1))
    assert len(vs) == 2
    expected = np.array([[1, 1j], [1, -1j]]) / np.sqrt(2)
    for v in vs.vectors:
        assert np.max(np.abs(expected.conj() @ v)) > 1 - 1e-12
    assert len(third_bases(vs)) == 1


def test_collect_rejects_non_mu_pair():
    with pytest.raises(ValueError):
        collect((np.eye(3), np.eye(3)), 10)


def test_collect_parallel_matches_serial():
    pair = (np.eye(6), hadamard_basis(catalog.fourier(6)))
    cfg = SolverConfig(rng_seed=9)
    a = collect(pair, 600, cfg, early_stop=False)
    b = collect(pair, 600, cfg, workers=2, early_stop=False)
    assert np.array_equal(a.vectors, b.vectors) and a.hits == b.hits


def test_f6_set(f6_set):
    assert len(f6_set) == 48
    assert f6_set.n_converged <= f6_set.n_seeds
    assert np.all(mu_distance(f6_set.bases, f6_set.vectors) <= 1e-11)
    gram = np.abs(f6_set.vectors.conj() @ f6_set.vectors.T) - np.eye(48)
    assert np.max(gram) < 1 - 1e-8


def test_f6_third_bases(f6_set):
    bases = third_bases(f6_set)
    assert len(bases) == 16
    for b in bases:
        assert all(mu_deviation(b, p) <= 1e-10 for p in f6_set.bases)


def test_f6_orbits(f6_set):
    part = classify_orbits(f6_set)
    assert part.closed and part.sizes == [6, 6, 36]


def test_f6_triplet_not_extendable(f6_set):
    t = Triplet(f6_set.bases, third_bases(f6_set)[0])
    assert len(extend_triplet(t, 500, SolverConfig(rng_seed=2))) == 0


def test_f6_algebraic_match(f6_set):
    m = match_algebraic(f6_set.vectors, fourier_alphabets())
    assert (len(m.pure_roots), len(m.with_irrational), len(m.unmatched)) == (12, 36, 0)


def test_f6_hits_uniform():
    pair = (np.eye(6), hadamard_basis(catalog.fourier(6)))
    vs = collect(pair, 4800, SolverConfig(rng_seed=7), early_stop=False)
    assert len(vs) == 48
    assert chisquare(vs.hits).pvalue > 1e-3


def test_tao_set(tao_set):
    assert len(tao_set) == 90
    assert third_bases(tao_set) == []


def test_dita0_set(dita0_set):
    bases = third_bases(dita0_set)
    assert len(bases) == 10
    m = match_algebraic(dita0_set.vectors[np.unique(np.concatenate(
        [[dita0_set.index_of(v) for v in b.T] for b in bases]))], dita_alphabets())
    assert not m.unmatched
    labels = triplet_classes(dita0_set.bases, bases)
    assert len(set(labels)) == 2
    refs = [hadamard_basis(H1), hadamard_basis(H2)]
    for ref in refs:
        assert any(same_basis(ref, b) for b in bases)


def test_dita0_reference_classes_differ():
    pair = (np.eye(6), hadamard_basis(catalog.dita(0.0)))
    assert len(pair_permutations(pair)) == 10
    refs = [hadamard_basis(H1), hadamard_basis(H2)]
    assert triplet_classes(pair, refs) == [0, 1]
    for r in refs:
        assert not match_algebraic(r.T, dita_alphabets()).unmatched


def test_triplet_validation():
    f6 = hadamard_basis(catalog.fourier(6))
    with pytest.raises(ValueError):
        Triplet((np.eye(6), f6), f6)


def test_xz_triplet_is_mu():
    for d in range(2, 8):
        z, x, xz = xz_eigenbases(d)
        for a, b in ((z, x), (z, xz), (x, xz)):
            assert mu_deviation(a, b) <= 1e-10


def test_xz_triplet_extends_in_d5():
    z, x, xz = xz_eigenbases(5)
    ext = extend_triplet(Triplet((z, x), xz), 300, SolverConfig(rng_seed=3))
    assert len(ext) > 0
    assert np.all(mu_distance((z, x), ext.vectors) <= 1e-11)


def test_displacement_examples():
    assert np.allclose(displacement(0, 0, 6), np.eye(6))
    assert np.allclose(displacement(1, 0, 6), shift_operator(6))
    assert np.allclose(shift_operator(4) @ np.eye(4)[:, 0], np.eye(4)[:, 1])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 7), *(st.integers(0, 20) for _ in range(4)))
def test_weyl_composition(d, p1, p2, q1, q2):
    a = displacement(p1, p2, d) @ displacement(q1, q2, d)
    b = displacement(p1 + q1, p2 + q2, d)
    u = a @ b.conj().T
    ph = u[0, 0]
    assert abs(abs(ph) - 1) <= 1e-12
    assert np.allclose(u, ph * np.eye(d), atol=1e-12)


def test_orbit_generators():
    o1, o2, o3 = orbit(V1), orbit(V2), orbit(V3)
    assert (len(o1), len(o2), len(o3)) == (6, 6, 36)
    assert all(abs(np.vdot(a, b)) < 1 - 1e-8 for a in o1 for b in o2)
    for w in o1:
        assert any(abs(np.vdot(np.conj(w), u)) > 1 - 1e-12 for u in o2)
    for mu in range(1, 6):
        assert is_eigenvector(displacement(mu, mu, 6), V1)
        assert is_eigenvector(displacement(mu, 5 * mu, 6), V2)
    assert stabilizing_displacements(V3) == []


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6, 7])
def test_orbits_of_brute_force_vectors(d):
    rng = np.random.default_rng(d)
    pair = (np.eye(d), hadamard_basis(catalog.fourier(d)))
    for _ in range(3):
        v = lsq_mu_vector(pair[1], rng)
        o = orbit(v)
        # orbit-stabilizer; the stabilizer list omits the identity
        assert len(o) * (len(stabilizing_displacements(v)) + 1) == d * d
        if d in (2, 3, 5, 7):
            assert len(o) == (d if stabilizing_displacements(v) else d * d)
        assert np.all(mu_distance(pair, np.array(o)) <= 1e-12)


def test_composite_dimension_has_intermediate_orbits():
    # d = 4 admits MU vectors stabilized by a subgroup of order 2
    rng = np.random.default_rng(4)
    f4 = hadamard_basis(catalog.fourier(4))
    sizes = {len(orbit(lsq_mu_vector(f4, rng))) for _ in range(10)}
    assert 8 in sizes


def test_search_stop_when():
    pair = (np.eye(6), hadamard_basis(catalog.fourier(6)))
    vs = search(pair, 5000, SolverConfig(rng_seed=4), early_stop=False,
                stop_when=lambda s: len(s) >= 10, chunk=16)
    assert 10 <= len(vs) and vs.n_seeds < 5000
