import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mubforge import catalog
from mubforge.catalog import (
    FamilyId, FamilyPoint, ParameterRangeError, SingularParameterError, CatalogError,
)
from mubforge.linalg import is_hadamard, mu_deviation, hadamard_basis, random_unimodular_diagonal
from oracles import F4

angle = st.floats(-np.pi / 2, np.pi / 2, allow_nan=False)


def test_fourier_examples():
    assert np.allclose(catalog.fourier(4), F4, atol=1e-15)
    assert np.allclose(catalog.fourier(2), [[1, 1], [1, -1]], atol=1e-15)
    f6 = catalog.fourier(6)
    assert is_hadamard(f6) and mu_deviation(np.eye(6), hadamard_basis(f6)) <= 1e-12
    with pytest.raises(ParameterRangeError):
        catalog.fourier(1)


def test_fourier_family6():
    assert np.allclose(catalog.fourier_family6(0, 0), catalog.fourier(6), atol=1e-15)
    rng = np.random.default_rng(3)
    for a, b in rng.uniform(0, 2 * np.pi, (1000, 2)):
        assert is_hadamard(catalog.fourier_family6(a, b))
    for a, b in rng.uniform(0.2, 1.3, (4, 2)):
        assert not catalog.equivalence_test(catalog.fourier_family6(a, b), catalog.fourier(6))


def test_dita_domain():
    for c in np.linspace(-1 / 8, 1 / 8, 41):
        assert is_hadamard(catalog.dita(c))
    with pytest.raises(ParameterRangeError):
        catalog.dita(0.2)


def test_tao():
    s = catalog.tao()
    assert is_hadamard(s)
    assert np.max(np.abs(s**3 - 1)) <= 1e-12
    assert not catalog.equivalence_test(catalog.fourier(6), s)


def test_bjorck_domain():
    rng = np.random.default_rng(4)
    edge = catalog.BJORCK_EDGE
    for s in np.concatenate([rng.uniform(edge, np.pi, 200), rng.uniform(-np.pi, -edge, 200)]):
        assert is_hadamard(catalog.bjorck(s))
    with pytest.raises(ParameterRangeError):
        catalog.bjorck(0.0)


def test_matolcsi_domain():
    for t in np.concatenate([np.linspace(0.51, 1.0, 30), np.linspace(1.51, 2.0, 30)]) * np.pi:
        assert is_hadamard(catalog.matolcsi(t))
    for t in (0.0, np.pi / 2, 1.2 * np.pi):
        with pytest.raises(ParameterRangeError):
            catalog.matolcsi(t)


def test_karlsson2_examples():
    assert catalog.equivalence_test(catalog.karlsson2(0, 0), catalog.fourier(6))
    for x in (0.3, -0.9, 1.4):
        assert catalog.equivalence_test(catalog.karlsson2(x, 0), catalog.fourier_family6(x, x))
        assert catalog.equivalence_test(catalog.karlsson2(0, x), catalog.fourier_family6(x, x).T)
    assert is_hadamard(catalog.karlsson2(0.3, -0.8))


@pytest.mark.parametrize("s1,s2", [(1, 1), (-1, -1), (1, -1), (-1, 1)])
def test_karlsson2_corners_are_singular_with_dita_limits(s1, s2):
    with pytest.raises(SingularParameterError):
        catalog.karlsson2(s1 * np.pi / 2, s2 * np.pi / 2)
    for angle_, c in ((0.0, -1 / 8), (np.pi / 4, 0.0), (np.pi / 2, 1 / 8)):
        lim = catalog.karlsson2_corner_limit(s1, s2, angle_)
        assert is_hadamard(lim)
        assert catalog.equivalence_test(lim, catalog.dita(c))


def test_karlsson2_dita_corner_via_diagonal():
    # dita(0) is the limit along the diagonal into (pi/2, pi/2)
    eps = 1e-9
    k = catalog.karlsson2(np.pi / 2 - eps, np.pi / 2 - eps)
    assert catalog.equivalence_test(k, catalog.dita(0.0), 1e-6)


@settings(max_examples=200, deadline=None)
@given(angle, angle)
def test_karlsson2_exact_relations(x1, x2):
    if catalog.karlsson2_singular(x1, x2) or catalog.karlsson2_singular(-x1, x2):
        return
    r = catalog.karlsson2_relations(x1, x2)
    assert max(r.values()) <= 1e-12, r
    assert catalog.pi_shift_check(x1, x2)


def test_karlsson2_literal_relations_up_to_equivalence():
    rng = np.random.default_rng(5)
    for x1, x2 in rng.uniform(-1.5, 1.5, (5, 2)):
        assert all(catalog.karlsson2_relations_up_to_equivalence(x1, x2).values())


def test_pi_shift_examples():
    assert catalog.pi_shift_check(0.3, -0.8)
    assert catalog.pi_shift_check(0.0, 0.0)


def test_karlsson2_diagonal_is_matolcsi():
    for t in (0.6 * np.pi, 0.8 * np.pi, 1.7 * np.pi):
        x = catalog.matolcsi_diagonal(t)
        assert catalog.equivalence_test(catalog.karlsson2(x, x), catalog.matolcsi(t))


def test_karlsson3_random_points():
    rng = np.random.default_rng(6)
    n = 0
    for theta, phi, psi in rng.uniform(0, np.pi, (1000, 3)):
        try:
            h = catalog.karlsson3(theta, phi, psi)
        except SingularParameterError:
            continue
        n += 1
        assert is_hadamard(h)
    assert n > 990


def test_karlsson3_affine_slice():
    rng = np.random.default_rng(7)
    for phi, psi in rng.uniform(0, np.pi, (100, 2)):
        h = catalog.karlsson3(0.0, phi, psi)
        assert np.max(np.abs(h - catalog.karlsson3(0.0, 0.0, psi))) <= 1e-12
        assert np.max(np.abs(h - catalog.karlsson3_affine_slice(psi))) <= 1e-12
        # the Mobius maps degenerate to the constant 1 on this slice
        a, b = catalog.karlsson3_blocks(0.0, phi)
        z = np.exp(1j * rng.uniform(0.1, 2 * np.pi - 0.1))
        for alpha, beta in ((a[0, 1] ** 2, a[0, 0] ** 2), (b[0, 1] ** 2, b[0, 0] ** 2)):
            assert abs(catalog.mobius(alpha, beta, z) - 1) <= 1e-12
        assert np.allclose(catalog.karlsson3_phases(0.0, phi, psi)[1:], 1, atol=1e-15)


def test_karlsson3_mobius_chain():
    theta, phi, psi = 0.7, 1.3, 0.4
    a, b = catalog.karlsson3_blocks(theta, phi)
    z1, z2, z3, z4 = catalog.karlsson3_phases(theta, phi, psi)
    assert abs(z2**2 - catalog.mobius_inverse(a[0, 1] ** 2, a[0, 0] ** 2,
                                               catalog.mobius(b[0, 1] ** 2, b[0, 0] ** 2, z1**2))) <= 1e-12
    assert np.allclose(np.abs([z2, z3, z4]), 1, atol=1e-12)


def test_mobius_examples():
    z = np.exp(0.3j)
    assert abs(catalog.mobius(1, 0, z) + z) <= 1e-15
    with pytest.raises(SingularParameterError):
        catalog.mobius(1, 1, 1)


@settings(max_examples=200, deadline=None)
@given(*(st.floats(0, 2 * np.pi) for _ in range(3)))
def test_mobius_preserves_unit_circle(ta, tb, tz):
    alpha, beta, z = np.exp(1j * ta), 0.5 * np.exp(1j * tb), np.exp(1j * tz)
    w = catalog.mobius(alpha, beta, z)
    assert abs(abs(w) - 1) <= 1e-12
    assert abs(catalog.mobius_inverse(alpha, beta, w) - z) <= 1e-12


def test_equivalence_examples():
    rng = np.random.default_rng(8)
    h = catalog.karlsson2(0.4, 0.9)
    p = np.eye(6)[rng.permutation(6)]
    q = np.eye(6)[rng.permutation(6)]
    g = p @ random_unimodular_diagonal(6, rng) @ h @ random_unimodular_diagonal(6, rng) @ q
    w = catalog.equivalence_witness(g, h)
    assert w is not None and np.max(np.abs(w.apply(h) - g)) <= 1e-10
    assert not catalog.equivalence_test(catalog.fourier(6), catalog.tao())
    with pytest.raises(ValueError):
        catalog.equivalence_test(np.ones((2, 2)), np.ones((3, 3)))


def test_family_point_canonicalizes():
    p = FamilyPoint(FamilyId.KARLSSON2, (0.3 + np.pi, -0.8 - np.pi))
    assert np.allclose(p.params, (0.3, -0.8))
    assert catalog.equivalence_test(p.matrix(), catalog.karlsson2(0.3 + np.pi, -0.8 - np.pi))
    q = FamilyPoint(FamilyId.KARLSSON3, (0.3 + np.pi, 1.0, 2.0))
    assert abs(q.params[0] - 0.3) < 1e-12
    with pytest.raises(CatalogError):
        FamilyPoint(FamilyId.DITA6, ())


def test_family_arity_and_parse():
    assert [f.arity for f in FamilyId] == [0, 2, 1, 0, 1, 1, 2, 3]
    assert FamilyId.parse("K3") is FamilyId.KARLSSON3
    with pytest.raises(CatalogError):
        FamilyId.parse("X9")
    with pytest.raises(CatalogError):
        catalog.build("K2", (0.1,))
    with pytest.raises(CatalogError):
        catalog.build("S6", (), d=5)


def test_affine_family_spec():
    spec = catalog.DITA_FAMILY
    assert np.allclose(spec(0.05), catalog.dita(0.05))
    assert is_hadamard(spec(0.0))
