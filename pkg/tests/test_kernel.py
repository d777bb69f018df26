import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nilslice.kernel import (
    I,
    ONE,
    ZERO,
    GaussianRational as G,
    NonConvergence,
    OddCoefficient,
    Poly,
    b_from_uv,
    divide_exact,
    even_part,
    interpolate,
    roots,
    squarefree_decomposition,
    uv_from_b,
    w_from_u,
)

from conftest import rand_g

fracs = st.fractions(min_value=-50, max_value=50, max_denominator=20)
gauss = st.builds(G, fracs, fracs)
polys = st.lists(gauss, min_size=0, max_size=7).map(Poly)


def P(*cs):
    return Poly([G(c) for c in cs])


# ------------------------------------------------------------ GaussianRational


def test_lowest_terms_and_positive_denominator():
    x = G(Fraction(4, -6), Fraction(10, 4))
    assert x.re == Fraction(-2, 3) and x.re.denominator == 3
    assert x.im == Fraction(5, 2)


def test_i_squared():
    assert I * I == -ONE
    assert (I ** 4) == ONE
    assert I ** -1 == -I


@pytest.mark.parametrize("text,value", [
    ("0", G(0)),
    ("5", G(5)),
    ("-i", G(0, -1)),
    ("1/2-3*i", G(Fraction(1, 2), -3)),
    ("-2/3+5/7*i", G(Fraction(-2, 3), Fraction(5, 7))),
    ("4/9*i", G(0, Fraction(4, 9))),
])
def test_parse_and_format(text, value):
    assert G.parse(text) == value
    assert G.parse(str(value)) == value


@given(gauss, gauss, gauss)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == ZERO
    if b:
        assert (a / b) * b == a
        assert b * b.inverse() == ONE


def test_mixing_with_complex_goes_numeric():
    x = G(1, 2) * 0.5
    assert isinstance(x, complex) and x == 0.5 + 1j


# ------------------------------------------------------------------------ Poly


def test_no_trailing_zeros():
    assert P(1, 2, 0, 0).coeffs == P(1, 2).coeffs
    assert Poly([]).deg == -1 and P(0).is_zero()


@given(polys, polys)
def test_degree_of_product(p, q):
    if not p.is_zero() and not q.is_zero():
        assert (p * q).deg == p.deg + q.deg


@given(polys, polys, gauss)
def test_eval_is_ring_hom(p, q, x):
    assert (p * q)(x) == p(x) * q(x)
    assert (p + q)(x) == p(x) + q(x)


def test_json_round_trip():
    p = Poly([G(1, -2), G(0), G(Fraction(3, 4))])
    assert p.to_json() == ["1-2*i", "0", "3/4"]
    assert Poly.from_json(p.to_json()) == p


# ------------------------------------------------------------------- even_part


def test_even_part_examples():
    assert even_part(P(2, 0, -3, 0, 1)) == P(2, -3, 1)
    assert even_part(P(1)) == P(1)
    B = P(2, -3)
    assert B * B.reflect() == P(4, 0, -9)
    assert even_part(B * B.reflect()) == P(4, -9)


def test_even_part_rejects_odd():
    with pytest.raises(OddCoefficient) as e:
        even_part(P(1, 0, 0, 2))
    assert e.value.index == 3


def test_even_part_tolerates_float_noise_only():
    assert even_part(Poly([1.0, 1e-15, 2.0])).deg == 1
    with pytest.raises(OddCoefficient):
        even_part(Poly([1.0, 1e-3, 2.0]))


@given(polys)
def test_even_part_inverts_square_substitution(p):
    assert even_part(p.compose_square()) == p


# ----------------------------------------------------------- B -> (U, V) -> W


def test_uv_examples():
    y1 = G(7)
    U, V = uv_from_b(Poly([y1]), 4)
    assert U == Poly([-I * y1]) and V.is_zero()
    U, V = uv_from_b(Poly.t(), 1)
    assert U.is_zero() and V == Poly([I])


@pytest.mark.parametrize("m", range(1, 9))
def test_uv_identity(m):
    r = random.Random(m)
    for _ in range(100):
        B = Poly([rand_g(r) for _ in range(r.randint(1, 7))])
        U, V = uv_from_b(B, m)
        assert U * U + (V * V).shift(2) == B * B.reflect() * (-1) ** (m - 1)
        assert b_from_uv(U, V, m) == B
        assert all(c == 0 for c in U.coeffs[1::2]) and all(c == 0 for c in V.coeffs[1::2])


def test_w_from_u_examples():
    W, y = w_from_u(P(-5))
    assert W.is_zero() and y == G(5)
    W, y = w_from_u(P(-1, 2, 1))
    assert W == P(2, 1) and y == ONE


@given(polys)
def test_w_from_u_round_trip(U):
    W, y = w_from_u(U)
    assert W.shift(1) - Poly([y]) == U


# -------------------------------------------------------------- divide_exact


def test_divide_examples():
    assert divide_exact(P(0, 0, 0, 1), P(0, 1)) == (P(0, 0, 1), Poly([]))
    assert divide_exact(P(1, 0, 1), P(-1, 1)) == (P(1, 1), P(2))


@given(polys, polys)
def test_division_identity(p, a):
    if a.is_zero():
        return
    q, r = divide_exact(p, a)
    assert a * q + r == p
    assert r.deg < a.deg


def test_squarefree_decomposition():
    p = Poly.from_roots([G(2), G(2), G(-1), G(3), G(3), G(3)])
    parts = {k: f for f, k in squarefree_decomposition(p)}
    assert parts[1].monic() == Poly.from_roots([G(-1)])
    assert parts[2].monic() == Poly.from_roots([G(2)])
    assert parts[3].monic() == Poly.from_roots([G(3)])


# ----------------------------------------------------------------------- roots


def test_roots_simple():
    assert np.allclose(roots(P(-1, 0, 1)), [-1, 1])


def test_roots_clustered_multiplicity():
    zs = roots(P(4, -4, 1))
    assert len(zs) == 2 and all(abs(z - 2) < 1e-10 for z in zs)


def test_roots_multiplicity_numeric_input():
    zs = roots(Poly.from_roots([2.0, 2.0, 1j]))
    assert len(zs) == 3


def test_roots_known_degree_six():
    r = np.random.default_rng(3)
    for _ in range(20):
        true = r.standard_normal(6) + 1j * r.standard_normal(6)
        got = roots(Poly.from_roots(list(true)))
        for z in true:
            assert min(abs(z - w) for w in got) < 1e-9 * max(1, abs(z))


def test_roots_residual_contract():
    r = random.Random(5)
    for _ in range(30):
        p = Poly([rand_g(r) for _ in range(7)] + [ONE])
        pc = p.to_complex()
        for z in roots(p):
            scale = max(sum(abs(complex(c)) * abs(z) ** k for k, c in enumerate(pc.coeffs)), 1.0)
            assert abs(pc(z)) / scale < 1e-9


def test_roots_sorted_deterministically():
    zs = roots(P(1, 0, 0, 1))
    assert zs == sorted(zs, key=lambda z: (z.real, z.imag))


def test_roots_of_constant_rejected():
    with pytest.raises(ValueError):
        roots(P(3))


def test_roots_reconstruct_polynomial():
    r = random.Random(9)
    for _ in range(20):
        p = Poly([rand_g(r) for _ in range(5)] + [ONE])
        q = Poly.from_roots(roots(p))
        assert max(abs(complex(p[k]) - complex(q[k])) for k in range(6)) < 1e-8


# ----------------------------------------------------------------- interpolate


def test_interpolation_exact_on_polynomials():
    r = np.random.default_rng(2)
    nodes = list(r.standard_normal(4) + 1j * r.standard_normal(4))
    target = Poly([1 + 2j, -3, 0.5j, 2])
    got, cond = interpolate(nodes, [target(z) for z in nodes])
    assert max(abs(complex(got[k]) - complex(target[k])) for k in range(4)) < 1e-10
    assert cond >= 1


def test_interpolation_single_node():
    got, _ = interpolate([3.0], [7.0])
    assert got.deg == 0 and abs(complex(got[0]) - 7) < 1e-14
