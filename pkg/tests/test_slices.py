import random

import pytest

from nilslice.kernel import GaussianRational as G, Poly
from nilslice.liealg import AlgebraKind, GMatrix, charpoly_exact, coordinates, is_member, root_vector
from nilslice import linalg
from nilslice.slices import (
    InvalidIndex,
    NonDiagonalH,
    OddWeight,
    OrbitIndex,
    ShapeMismatch,
    SliceCoords,
    jm_triple,
    jordan_type,
    lambda_act_coords,
    lambda_act_matrix,
    nilpotent_rep,
    printed_weight_table_C,
    slice_directions,
    slice_point,
    valid_indices,
    weight_table,
)
from nilslice.spectra import closed_form_polys

from conftest import all_cells, rand_coords, rand_q

CELLS = all_cells()


def test_index_validity():
    assert [i.n for i in valid_indices("C", 4)] == [0, 1, 2]
    assert [i.n for i in valid_indices("D", 5)] == [0, 1, 2]
    assert [i.n for i in valid_indices("D", 4)] == [0, 1]
    assert [i.n for i in valid_indices("B", 5)] == [1, 2, 3]
    for bad in [("C", 4, 3), ("D", 4, 2), ("B", 3, 0), ("B", 3, 3), ("C", 2, -1)]:
        with pytest.raises(InvalidIndex):
            OrbitIndex.of(*bad)


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_lengths_and_codimension(idx):
    m, n = idx.m, idx.n
    want = {"C": (n, n, n, m - n), "D": (n, n, n + 1, m - n - 1), "B": (n - 1, n - 1, n, m - n)}[idx.family]
    assert idx.lengths() == want
    assert idx.dim == m + 2 * n == len(SliceCoords.names(idx))


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_nilpotent_rep(idx):
    X = nilpotent_rep(idx)
    assert is_member(X)
    assert charpoly_exact(X) == Poly.monomial(X.N)
    assert jordan_type(X) == sorted(idx.partition(), reverse=True)


def test_partitions():
    assert OrbitIndex.of("C", 5, 2).partition() == [6, 4]
    assert OrbitIndex.of("D", 5, 1).partition() == [7, 3]
    assert OrbitIndex.of("B", 5, 2).partition() == [7, 3, 1]


def test_nilpotent_rep_D3_n1_frozen():
    X = nilpotent_rep(OrbitIndex.of("D", 3, 1))
    assert sorted(X.nonzeros()) == [
        (0, 1, G(1)), (0, 4, G(1)), (1, 3, G(-1)), (1, 5, G(1)), (2, 4, G(-1)), (4, 3, G(-1)),
    ]


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_slice_through_xn_and_membership(idx, rng):
    assert slice_point(idx, SliceCoords.zero(idx)) == nilpotent_rep(idx)
    for _ in range(3):
        assert is_member(slice_point(idx, rand_coords(idx, rng)))


@pytest.mark.parametrize("idx", [i for i in CELLS if not i.modified], ids=str)
def test_slice_affine(idx, rng):
    c1, c2 = rand_coords(idx, rng), rand_coords(idx, rng)
    s = rand_q(rng)
    comb = SliceCoords.from_flat(idx, [x + s * y for x, y in zip(c1.flat(), c2.flat())])
    X = nilpotent_rep(idx)
    lhs = slice_point(idx, comb) - X
    rhs = (slice_point(idx, c1) - X) + (slice_point(idx, c2) - X) * s
    assert lhs == rhs


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_slice_injective(idx):
    V = [coordinates(v) for v in slice_directions(idx)]
    assert linalg.bareiss_rank(V) == idx.dim


def test_type_C_slice_display():
    idx = OrbitIndex.of("C", 4, 1)
    c = SliceCoords(idx, [G(1)], [G(2)], [G(3)], [G(5), G(6), G(7)])
    S = slice_point(idx, c) - nilpotent_rep(idx)
    low = [[S[4 + i, j] for j in range(4)] for i in range(4)]
    assert [low[k][k] for k in range(4)] == [G(7), G(6), G(5), G(1)]
    assert low[0][3] == low[3][0] == G(2)
    assert low[1][3] == low[3][1] == G(3)


def test_type_C_modified_slice():
    idx = OrbitIndex.of("C", 2, 1)
    assert idx.modified
    z, d = G(3), G(5)
    c = SliceCoords(idx, [G(0)], [G(0)], [z], [d])
    S = slice_point(idx, c) - nilpotent_rep(idx)
    assert S[2, 0] == d - z * z
    extra = root_vector(idx.kind, "e2-e1") * z
    for i, j, v in extra.nonzeros():
        assert S[i, j] == v


def test_coords_shape_and_json():
    idx = OrbitIndex.of("B", 4, 2)
    with pytest.raises(ShapeMismatch):
        SliceCoords.from_flat(idx, [1, 2])
    with pytest.raises(ShapeMismatch):
        SliceCoords(OrbitIndex.of("C", 2, 1), [1], [1], [1], [1], a0=1)
    c = SliceCoords.from_flat(idx, [G(k, -k) for k in range(idx.dim)])
    assert SliceCoords.from_json(c.to_json()) == c
    assert c.to_json()["a0"] == str(G(6, -6))
    with pytest.raises(ShapeMismatch):
        slice_point(OrbitIndex.of("C", 4, 1), c)


# --------------------------------------------------------------- JM triples


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_jm_relations(idx):
    T = jm_triple(idx)
    assert T.Nplus == nilpotent_rep(idx)
    assert T.relations_hold()
    h = sorted(T.H[i, i] .re for i in range(T.H.N))
    assert h == sorted(-x for x in h)


# ----------------------------------------------------------------- lambda


def test_lambda_identity_and_fixed_point():
    idx = OrbitIndex.of("D", 5, 1)
    H = jm_triple(idx).H
    X = nilpotent_rep(idx)
    assert lambda_act_matrix(G(1), X + X, H) == X + X
    assert lambda_act_matrix(G(7, 2), X, H) == X
    c = SliceCoords.from_flat(idx, list(range(idx.dim)))
    assert lambda_act_coords(idx, 1, c) == c


def test_lambda_errors():
    k = AlgebraKind("C", 2)
    with pytest.raises(NonDiagonalH):
        lambda_act_matrix(G(2), GMatrix.zero(k), root_vector(k, "e1-e2"))
    with pytest.raises(OddWeight):
        lambda_act_matrix(G(2), GMatrix.zero(k), GMatrix.diag(k, [G(1), G(2), G(-1), G(-2)]))


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_lambda_matrix_vs_coords(idx, rng):
    H = jm_triple(idx).H
    for _ in range(3):
        r, c = rand_q(rng, 1, 9), rand_coords(idx, rng)
        assert lambda_act_matrix(r, slice_point(idx, c), H) == slice_point(idx, lambda_act_coords(idx, r, c))


@pytest.mark.parametrize("idx", [i for i in CELLS if i.m <= 4], ids=str)
def test_lambda_scales_eigenvalues(idx, rng):
    H = jm_triple(idx).H
    r, c = G(3), rand_coords(idx, rng)
    S = slice_point(idx, c)
    chi = charpoly_exact(S)
    chi_r = charpoly_exact(lambda_act_matrix(r, S, H))
    N = S.N
    # chi_r(t) = r^N chi(t / r)
    assert chi_r == Poly([c * r ** (N - k) for k, c in enumerate(chi.coeffs)])


@pytest.mark.parametrize("idx", [i for i in CELLS if not i.modified], ids=str)
def test_lambda_slice_invariance_by_solving(idx, rng):
    H = jm_triple(idx).H
    X = nilpotent_rep(idx)
    r, c = G(-2), rand_coords(idx, rng)
    target = coordinates(lambda_act_matrix(r, slice_point(idx, c), H) - X)
    rows = linalg.transpose([coordinates(v) for v in slice_directions(idx)])
    sol = linalg.solve(rows, target)
    assert sol == lambda_act_coords(idx, r, c).flat()


@pytest.mark.parametrize("idx", CELLS, ids=str)
def test_weights_make_chi_quasi_homogeneous(idx, rng):
    c = rand_coords(idx, rng)
    r, t = G(2), G(3, 1)
    chi_r = closed_form_polys(idx, lambda_act_coords(idx, r, c)).chi()
    assert chi_r(r * t) == closed_form_polys(idx, c).chi()(t) * r ** idx.kind.N


def test_weight_examples():
    idx = OrbitIndex.of("C", 4, 1)
    c = SliceCoords.from_flat(idx, [1] * 6)
    # a1, y1, z1, d1..d3
    assert lambda_act_coords(idx, 2, c).flat() == [G(4), G(16), G(8), G(4), G(16), G(64)]
    assert weight_table(OrbitIndex.of("D", 5, 1)) == (2, 5, 4, 3, 2, 4, 6)
    assert weight_table(OrbitIndex.of("B", 4, 2)) == (2, 4, 3, 2, 2, 4, 2, 3)


@pytest.mark.parametrize("idx", [i for i in CELLS if i.family == "C"], ids=str)
def test_type_C_weights_formula(idx):
    m, n = idx.m, idx.n
    computed = weight_table(idx)
    printed = printed_weight_table_C(idx)
    la, ly, lz, _ = idx.lengths()
    zs = slice(la + ly, la + ly + lz)
    # a, y, d agree with the printed rule; z carries m - n - i + 1 rather than m + n - i + 1
    assert computed[:la + ly] == printed[:la + ly]
    assert computed[la + ly + lz:] == printed[la + ly + lz:]
    assert computed[zs] == tuple(m - n - i + 1 for i in range(1, lz + 1))
    assert printed[zs] == tuple(m + n - i + 1 for i in range(1, lz + 1))
