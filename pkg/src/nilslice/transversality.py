"""Rank certificates for V_n + [g, X_n] = g and fiber Jacobian ranks."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .kernel import GaussianRational, Poly
from .liealg import ad_matrix, coordinates
from . import linalg
from .slices import OrbitIndex, SliceCoords, nilpotent_rep, slice_directions
from .spectra import _y_of, closed_form_polys, omega, reduced_charpoly


@dataclass(frozen=True)
class TransversalityCertificate:
    kind: str
    m: int
    n: int
    dim_g: int
    rank_ad: int
    dim_V: int
    rank_joint: int
    verdict: bool

    def to_json(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=None)
def transversality_certificate(idx: OrbitIndex) -> TransversalityCertificate:
    X = nilpotent_rep(idx)
    ad = ad_matrix(X)
    images = linalg.transpose(ad)  # row k = [X, basis_k]
    r_rows, r_cols = linalg.rank_two_ways(images)
    if r_rows != r_cols:
        raise ArithmeticError(f"row rank {r_rows} != column rank {r_cols}")
    V = [coordinates(v) for v in slice_directions(idx)]
    dim_V = linalg.bareiss_rank(V)
    joint = linalg.bareiss_rank(images + V)
    dim_g = idx.kind.dim
    return TransversalityCertificate(
        idx.family, idx.m, idx.n, dim_g, r_rows, dim_V, joint,
        joint == r_rows + dim_V == dim_g,
    )


# ------------------------------------------------------------- fiber Jacobian


def reduced_coefficients(idx: OrbitIndex, c: SliceCoords) -> list:
    """Invariant coordinates of the fiber map: the m lower coefficients of P,
    with P_0 = (-1)^m p^2 replaced by p itself in type D."""
    P = reduced_charpoly(idx.family, closed_form_polys(idx, c).chi())
    out = [P[k] for k in range(idx.m)]
    if idx.family == "D":
        out[0] = _y_of(idx, c) / omega(idx.m)
    return out


def _pieces(idx: OrbitIndex, c: SliceCoords):
    f = closed_form_polys(idx, c)
    if idx.family == "B":
        return f.a, f.dt, f.bt
    return f.A, f.D, f.B


def _chi_from(idx: OrbitIndex, p, q, b, dp=None, dq=None, db=None) -> Poly:
    """chi from the pieces, or its directional derivative when d* are given."""
    s = (-1) ** idx.m
    if dp is None:
        prod = p * q
        bb = b * b.reflect()
    else:
        prod = dp * q + p * dq
        bb = db * b.reflect() + b * db.reflect()
    if idx.family == "C":
        return prod - bb * s
    if idx.family == "D":
        return prod.shift(2) + bb * s
    top = prod - bb * s
    return Poly(top.coeffs[1:])


def jacobian_exact(idx: OrbitIndex, c: SliceCoords) -> list[list]:
    """d P_k / d c_j from the closed forms by the product rule.

    Every piece is at most quadratic in the coordinates, so its derivative is
    the exact symmetric difference with unit step."""
    base = _pieces(idx, c)
    flat = c.flat()
    cols = []
    for j in range(idx.dim):
        up, dn = list(flat), list(flat)
        up[j] = up[j] + 1
        dn[j] = dn[j] - 1
        pu = _pieces(idx, SliceCoords.from_flat(idx, up))
        pd = _pieces(idx, SliceCoords.from_flat(idx, dn))
        half = GaussianRational("1/2") if all(isinstance(x, GaussianRational) for x in flat) else 0.5
        d = [(u - v) * half for u, v in zip(pu, pd)]
        dchi = _chi_from(idx, *base, *d)
        dP = reduced_charpoly(idx.family, dchi)
        col = [dP[k] for k in range(idx.m)]
        if idx.family == "D":
            # p is affine in c
            col[0] = (_y_of(idx, SliceCoords.from_flat(idx, up)) - _y_of(idx, SliceCoords.from_flat(idx, dn))) * half / omega(idx.m)
        cols.append(col)
    return linalg.transpose(cols)


def jacobian_numeric(idx: OrbitIndex, c: SliceCoords) -> np.ndarray:
    return np.array([[complex(x) for x in row] for row in jacobian_exact(idx, c)], dtype=complex)


def jacobian_finite_difference(idx: OrbitIndex, c: SliceCoords, h: float = 1e-5) -> np.ndarray:
    flat = [complex(x) for x in c.flat()]
    cols = []
    for j in range(idx.dim):
        up, dn = list(flat), list(flat)
        up[j] += h
        dn[j] -= h
        fu = reduced_coefficients(idx, SliceCoords.from_flat(idx, up))
        fd = reduced_coefficients(idx, SliceCoords.from_flat(idx, dn))
        cols.append([(complex(a) - complex(b)) / (2 * h) for a, b in zip(fu, fd)])
    return np.array(cols, dtype=complex).T


def _equilibrate(J: np.ndarray, passes: int = 3) -> np.ndarray:
    """Diagonal row and column scaling to unit max-norm; rank is unchanged."""
    J = np.array(J, dtype=complex)
    for _ in range(passes):
        r = np.max(np.abs(J), axis=1, keepdims=True)
        J = J / np.where(r > 0, r, 1.0)
        c = np.max(np.abs(J), axis=0, keepdims=True)
        J = J / np.where(c > 0, c, 1.0)
    return J


def numeric_rank(J: np.ndarray, tol: float = 1e-8) -> int:
    """Singular values above tol * sigma_max after equilibration."""
    if J.size == 0:
        return 0
    s = np.linalg.svd(_equilibrate(J), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > tol * s[0]))


def fiber_jacobian_rank(idx: OrbitIndex, c: SliceCoords, tol: float = 1e-8) -> int:
    return numeric_rank(jacobian_numeric(idx, c), tol)
