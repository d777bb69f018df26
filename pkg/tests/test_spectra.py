import random

import numpy as np
import pytest

from nilslice.kernel import GaussianRational as G, Poly, i_power
from nilslice.liealg import AlgebraKind, GMatrix, cartan_element, charpoly_exact, root_vector
from nilslice.slices import OrbitIndex, SliceCoords, nilpotent_rep, slice_point
from nilslice.spectra import (
    InconsistentSign,
    ParityViolation,
    SpectralClass,
    _y_of,
    charpoly_identity_check,
    charpoly_identity_check_printed,
    closed_form_polys,
    fiber_residual,
    is_regular,
    kleinian_check,
    omega,
    pfaffian_invariant,
    q_tau,
    reduced_charpoly,
    spectral_class_of,
    surface,
    y_multiple,
)

from conftest import all_cells, rand_coords

CELLS = all_cells()
T = Poly.t()


def P(*cs):
    return Poly([G(c) for c in cs])


def ex_C41():
    idx = OrbitIndex.of("C", 4, 1)
    return idx, SliceCoords(idx, [G(1)], [G(2)], [G(3)], [G(0)] * 3)


def test_closed_form_example():
    idx, c = ex_C41()
    f = closed_form_polys(idx, c)
    assert f.A == P(-1, 0, 1)
    assert f.D == Poly.monomial(6)
    assert f.B == P(2, -3)


def test_charpoly_example_exact_value():
    idx, c = ex_C41()
    exact = charpoly_exact(slice_point(idx, c))
    # independent oracle (sympy determinant): t^8 - t^6 + 9 t^2 - 4
    assert exact == P(-4, 0, 9, 0, 0, 0, -1, 0, 1)
    assert exact == P(-1, 0, 1) * Poly.monomial(6) - P(4, 0, -9)
    assert closed_form_polys(idx, c).chi() == exact
    assert charpoly_identity_check(idx, c).is_zero()
    # the printed sign would give (t^2 - 1) t^6 + (4 - 9 t^2)
    assert closed_form_polys(idx, c).chi_printed() == P(-1, 0, 1) * Poly.monomial(6) + P(4, 0, -9)
    assert not charpoly_identity_check_printed(idx, c).is_zero()


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_identity_exact(idx, rng):
    assert charpoly_identity_check(idx, SliceCoords.zero(idx)).is_zero()
    for _ in range(3):
        assert charpoly_identity_check(idx, rand_coords(idx, rng)).is_zero()


@pytest.mark.parametrize("idx", [i for i in CELLS if i.family in "CB" and i.n >= 1], ids=str)
def test_printed_forms_fail_generically(idx, rng):
    c = rand_coords(idx, rng)
    while (closed_form_polys(idx, c).B.is_zero()):
        c = rand_coords(idx, rng)
    assert not charpoly_identity_check_printed(idx, c).is_zero()


def test_zero_coords_closed_forms():
    for idx in [OrbitIndex.of("D", 5, 1), OrbitIndex.of("D", 6, 2)]:
        f = closed_form_polys(idx, SliceCoords.zero(idx))
        k = idx.m - idx.n
        assert f.A == Poly.monomial(2 * idx.n)
        assert f.B == Poly.monomial(k + idx.n, -G((-1) ** k))
    idx = OrbitIndex.of("C", 4, 2)
    f = closed_form_polys(idx, SliceCoords.zero(idx))
    assert f.B.is_zero() and f.A == Poly.monomial(4)


# ------------------------------------------------------------ spectral data


def test_spectral_class_examples():
    for idx in [OrbitIndex.of("C", 3, 1), OrbitIndex.of("B", 3, 2), OrbitIndex.of("D", 4, 1)]:
        tau = spectral_class_of(nilpotent_rep(idx))
        assert tau.mu == (0j,) * idx.m
    tau = spectral_class_of(cartan_element(AlgebraKind("C", 2), [G(1), G(2)]))
    assert tau.mu == (1 + 0j, 4 + 0j)


def test_spectral_class_conjugation_invariant(rng):
    idx = OrbitIndex.of("C", 3, 1)
    S = slice_point(idx, rand_coords(idx, rng))
    X = root_vector(idx.kind, "e1+e2")
    g = GMatrix.diag(idx.kind, [G(1)] * 6) + X * G(5)
    gi = GMatrix.diag(idx.kind, [G(1)] * 6) - X * G(5)
    a, b = spectral_class_of(S), spectral_class_of(g @ S @ gi)
    assert np.allclose(a.mu, b.mu)


def test_parity_violation():
    k = AlgebraKind("C", 1)
    M = GMatrix(k, [[G(1), G(0)], [G(0), G(0)]])
    with pytest.raises(ParityViolation):
        spectral_class_of(M)
    with pytest.raises(ParityViolation):
        reduced_charpoly("B", P(1, 0, 1))


def test_pfaffian_invariant_on_cartan():
    for m in range(1, 6):
        x = [G(k + 1, k) for k in range(m)]
        p = G(1)
        for v in x:
            p = p * v
        assert pfaffian_invariant(cartan_element(AlgebraKind("D", m), x)) == p


@pytest.mark.parametrize("idx", [i for i in CELLS if i.family == "D"], ids=str)
def test_type_D_sign_relations(idx, rng):
    m = idx.m
    for _ in range(3):
        c = rand_coords(idx, rng)
        S = slice_point(idx, c)
        tau = spectral_class_of(S)
        p = tau.pSign
        y = _y_of(idx, c)
        assert tau.P()[0] == p * p * (-1) ** m
        assert y == omega(m) * p
        assert p * p == y * y * (-1) ** (m + 1)
        # the uncorrected relation p^2 = y^2 holds only for odd m
        assert (p * p == y * y) == (m % 2 == 1 or p == 0)


def test_omega_and_kappa_tables():
    assert [omega(m) for m in range(2, 7)] == [G(0, 1), G(1), G(0, -1), G(-1), G(0, 1)]
    for m in range(2, 7):
        assert omega(m) ** 2 == G((-1) ** (m + 1))
    for m in range(3, 7):
        assert y_multiple(OrbitIndex.of("D", m, 1)) == -i_power(m - 1)
    assert y_multiple(OrbitIndex.of("D", 6, 2)) == -i_power(5)


def test_q_tau():
    tau = SpectralClass.from_mu(AlgebraKind("D", 1), [4], G(2))
    assert tau.P() == Poly.from_roots([4 + 0j])
    assert abs(complex(q_tau(tau)[0]) - 1) < 1e-12 and q_tau(tau).deg == 0
    tau0 = SpectralClass.from_mu(AlgebraKind("D", 3), [0, 1, 5], 0)
    assert np.allclose([complex(c) for c in q_tau(tau0).coeffs], [complex(c) for c in Poly.from_roots([1, 5]).coeffs])
    with pytest.raises(InconsistentSign):
        q_tau(SpectralClass.from_mu(AlgebraKind("D", 2), [1, 4], G(3)))


@pytest.mark.parametrize("idx", [i for i in CELLS if i.family == "D"], ids=str)
def test_q_tau_reconstructs_P(idx, rng):
    tau = spectral_class_of(slice_point(idx, rand_coords(idx, rng)))
    Q = q_tau(tau)
    back = Q.shift(1) + Poly([tau.pSign * tau.pSign * (-1) ** idx.m])
    assert back == tau.P()


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_fiber_residual(idx, rng):
    c = rand_coords(idx, rng)
    tau = spectral_class_of(slice_point(idx, c))
    r = fiber_residual(idx, c, tau)
    assert r.is_zero()
    bumped = c.replace_flat(0, c.flat()[0] + 1)
    assert not fiber_residual(idx, bumped, tau).is_zero()


def test_fiber_residual_type_D_zero_sign(rng):
    idx = OrbitIndex.of("D", 5, 1)
    k = SliceCoords.names(idx).index("y1")
    c = rand_coords(idx, rng).replace_flat(k, 0)
    tau = spectral_class_of(slice_point(idx, c))
    assert tau.pSign == 0 and any(abs(x) < 1e-9 for x in tau.mu)
    assert fiber_residual(idx, c, tau).is_zero()


def test_numeric_tau_fiber_residual(rng):
    idx = OrbitIndex.of("C", 5, 2)
    c = rand_coords(idx, rng)
    exact = spectral_class_of(slice_point(idx, c))
    numeric = SpectralClass(exact.kind, exact.mu)
    r = fiber_residual(idx, c, numeric)
    assert r.max_abs() < 1e-9 * max(1.0, exact.P().max_abs())


# ------------------------------------------------------------------ surfaces


def test_surfaces_at_zero():
    z, u, v = 1.3 - 0.2j, 0.7j, -2.1
    for m in range(2, 6):
        C0 = SpectralClass.from_mu(AlgebraKind("C", m), [0] * m)
        assert abs(surface("C", C0)(u, v, z) - (z ** m + u * u + z * v * v)) < 1e-12
        D0 = SpectralClass.from_mu(AlgebraKind("D", m), [0] * m, 0)
        w = u
        assert abs(surface("D", D0)(v, w, z) - (z ** (m - 1) + v * v + z * w * w)) < 1e-12
        B0 = SpectralClass.from_mu(AlgebraKind("B", m), [0] * m)
        assert abs(surface("B", B0)(u, v, z) - (z ** (m + 1) + u * u + z * v * v)) < 1e-12


def test_gamma_reduces_to_sigma_when_p_is_zero():
    tau = SpectralClass.from_mu(AlgebraKind("D", 3), [0, 2, -1], 0)
    S = surface("D", tau)
    reduced = SpectralClass.from_mu(AlgebraKind("C", 2), [2, -1])
    Sig = surface("C", reduced)
    for v, w, z in [(1, 2, 3), (0.5j, -1, 2 + 1j)]:
        assert abs(S(v, w, z) - Sig(v, w, z)) < 1e-12


def test_gamma_linear_term_is_two_y():
    tau = SpectralClass.from_mu(AlgebraKind("D", 3), [1, 4, 9], G(6))
    S = surface("D", tau)
    y = complex(omega(3) * 6)
    assert abs(S(0, 1, 0) - S(0, 0, 0) - (0 - 2 * y)) < 1e-9


def test_is_regular():
    C3, D3 = AlgebraKind("C", 3), AlgebraKind("D", 3)
    assert is_regular(SpectralClass.from_mu(C3, [1, 2, 3]))
    assert not is_regular(SpectralClass.from_mu(C3, [0, 1, 2]))
    assert is_regular(SpectralClass.from_mu(D3, [0, 1, 2], 0))
    assert not is_regular(SpectralClass.from_mu(AlgebraKind("C", 2), [1, 1]))


# ------------------------------------------------------------------ Kleinian


@pytest.mark.parametrize("family,m", [("C", m) for m in range(2, 7)] + [("D", m) for m in range(3, 7)]
                         + [("B", m) for m in range(2, 7)])
def test_kleinian_table(family, m):
    r = kleinian_check(family, m)
    assert r["passed"], r


def test_kleinian_examples():
    assert kleinian_check("C", 3)["type"] == "D4"
    assert kleinian_check("D", 4)["type"] == "D4"
    r = kleinian_check("B", 2)
    assert r["expected"] == "A3" and r["passed"]
