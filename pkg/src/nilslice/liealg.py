"""Matrix realizations of sp(2m), so(2m) and so(2m+1).

Conventions (1-indexed as in the formulas, 0-indexed in code):

* type C, N = 2m:  X_{e_i-e_j} = E_ij - E_{j+m,i+m},  X_{e_i+e_j} = E_{i,j+m} + E_{j,i+m},
  X_{-e_i-e_j} = E_{i+m,j} + E_{j+m,i},  X_{2e_i} = E_{i,i+m},  X_{-2e_i} = E_{i+m,i}
* type D, N = 2m:  X_{e_i-e_j} = E_ij - E_{m+j,m+i},  X_{e_i+e_j} = E_{i,m+j} - E_{j,m+i},
  X_{-e_i-e_j} = E_{m+i,j} - E_{m+j,i}   (i < j)
* type B, N = 2m+1: the type-D vectors shifted by one row and column, plus
  X_{e_i} = E_{1,i+m+1} - E_{i+1,1},  X_{-e_i} = E_{1,i+1} - E_{i+m+1,1}
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .kernel import ONE, ZERO, GaussianRational, NilsliceError, Poly
from . import linalg


class InvalidRoot(NilsliceError):
    pass


class KindMismatch(NilsliceError):
    pass


class NotMember(NilsliceError):
    pass


class NotAntisymmetric(NilsliceError):
    pass


class OddDimension(NilsliceError):
    pass


@dataclass(frozen=True)
class AlgebraKind:
    family: str
    m: int

    def __post_init__(self):
        if self.family not in ("C", "D", "B"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.m < 1:
            raise ValueError("rank must be positive")

    @property
    def N(self) -> int:
        return 2 * self.m + (1 if self.family == "B" else 0)

    @property
    def dim(self) -> int:
        m = self.m
        return m * (2 * m - 1) if self.family == "D" else m * (2 * m + 1)

    @property
    def offset(self) -> int:
        """Index shift of the e_i block (1 for type B)."""
        return 1 if self.family == "B" else 0

    def __str__(self):
        return f"{self.family}{self.m}"

    def to_json(self):
        return {"kind": self.family, "m": self.m}


@dataclass(frozen=True, order=True)
class RootLabel:
    """A root as its coefficient vector in the basis e_1..e_m."""

    vec: tuple

    @classmethod
    def of(cls, m: int, terms: dict) -> "RootLabel":
        v = [0] * m
        for i, c in terms.items():
            if not 1 <= i <= m:
                raise InvalidRoot(f"index e{i} out of range for rank {m}")
            v[i - 1] += c
        return cls(tuple(v))

    @classmethod
    def parse(cls, m: int, text: str) -> "RootLabel":
        """Parse strings such as 'e1-e2', '-2e3', 'e1+e4', '-e2'."""
        if not re.fullmatch(r"([+-]?\d*e\d+)+", text.replace(" ", "")):
            raise InvalidRoot(f"cannot parse root {text!r}")
        terms: dict = {}
        for sign, coef, idx in re.findall(r"([+-]?)(\d*)e(\d+)", text.replace(" ", "")):
            c = int(coef) if coef else 1
            terms[int(idx)] = terms.get(int(idx), 0) + (-c if sign == "-" else c)
        return cls.of(m, terms)

    def support(self):
        return [(i + 1, c) for i, c in enumerate(self.vec) if c]

    def is_positive(self) -> bool:
        return next(c for c in self.vec if c) > 0

    def __neg__(self):
        return RootLabel(tuple(-c for c in self.vec))

    def __str__(self):
        parts = []
        for i, c in self.support():
            s = "-" if c < 0 else "+"
            parts.append(f"{s}{abs(c) if abs(c) != 1 else ''}e{i}")
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out


def is_valid_root(family: str, root: RootLabel) -> bool:
    sup = root.support()
    if len(sup) == 2:
        return all(abs(c) == 1 for _, c in sup)
    if len(sup) == 1:
        c = sup[0][1]
        return (family == "C" and abs(c) == 2) or (family == "B" and abs(c) == 1)
    return False


def roots_of(kind: AlgebraKind) -> list[RootLabel]:
    """Positive roots in decreasing lexicographic order, then their negatives."""
    m = kind.m
    pos = set()
    for i in range(m):
        for j in range(i + 1, m):
            for s in (1, -1):
                v = [0] * m
                v[i], v[j] = 1, s
                pos.add(tuple(v))
        v = [0] * m
        if kind.family == "C":
            v[i] = 2
            pos.add(tuple(v))
        elif kind.family == "B":
            v[i] = 1
            pos.add(tuple(v))
    ordered = [RootLabel(v) for v in sorted(pos, reverse=True)]
    return ordered + [-r for r in ordered]


class GMatrix:
    """Square matrix over Q(i) (or complex, numerically) tagged with its algebra."""

    __slots__ = ("kind", "entries")

    def __init__(self, kind: AlgebraKind, entries):
        N = kind.N
        rows = [list(r) for r in entries]
        if len(rows) != N or any(len(r) != N for r in rows):
            raise ValueError(f"expected a {N}x{N} matrix")
        self.kind = kind
        self.entries = tuple(
            tuple(x if isinstance(x, (GaussianRational, complex)) else _coerce(x) for x in r)
            for r in rows
        )

    @classmethod
    def zero(cls, kind: AlgebraKind) -> "GMatrix":
        N = kind.N
        return cls(kind, [[ZERO] * N for _ in range(N)])

    @classmethod
    def diag(cls, kind: AlgebraKind, values: Sequence) -> "GMatrix":
        N = kind.N
        return cls(kind, [[values[i] if i == j else ZERO for j in range(N)] for i in range(N)])

    @property
    def N(self) -> int:
        return self.kind.N

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, GMatrix) and self.kind == other.kind and self.entries == other.entries

    def __hash__(self):
        return hash((self.kind, self.entries))

    def __repr__(self):
        return f"GMatrix({self.kind}, {[[str(x) for x in r] for r in self.entries]})"

    def _check(self, other):
        if not isinstance(other, GMatrix):
            raise TypeError("expected a GMatrix")
        if other.kind != self.kind:
            raise KindMismatch(f"{self.kind} vs {other.kind}")

    def __add__(self, other):
        self._check(other)
        return GMatrix(self.kind, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __sub__(self, other):
        self._check(other)
        return GMatrix(self.kind, [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self):
        return GMatrix(self.kind, [[-a for a in r] for r in self.entries])

    def __mul__(self, c):
        c = _coerce(c)
        return GMatrix(self.kind, [[a * c for a in r] for r in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check(other)
        return GMatrix(self.kind, matmul(self.entries, other.entries))

    def transpose(self) -> "GMatrix":
        return GMatrix(self.kind, list(zip(*self.entries)))

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.entries for x in r)

    def nonzeros(self):
        return [(i, j, x) for i, r in enumerate(self.entries) for j, x in enumerate(r) if x != 0]

    def to_json(self) -> dict:
        return {"kind": self.kind.family, "m": self.kind.m, "entries": [[str(x) for x in r] for r in self.entries]}

    @classmethod
    def from_json(cls, data: dict) -> "GMatrix":
        kind = AlgebraKind(data["kind"], int(data["m"]))
        return cls(kind, [[GaussianRational.parse(x) for x in r] for r in data["entries"]])


def _coerce(x):
    if isinstance(x, (GaussianRational, complex)):
        return x
    if isinstance(x, float):
        return complex(x)
    return GaussianRational.coerce(x)


def matmul(A, B):
    """Dense product that skips zero entries of A."""
    n, k = len(A), len(B[0])
    out = [[ZERO] * k for _ in range(n)]
    Bnz = [[(j, x) for j, x in enumerate(row) if x != 0] for row in B]
    for i, row in enumerate(A):
        acc = out[i]
        for l, a in enumerate(row):
            if a == 0:
                continue
            for j, b in Bnz[l]:
                acc[j] = acc[j] + a * b
    return out


def elementary(kind: AlgebraKind, i: int, j: int) -> list[list]:
    """E_{i,j} (1-indexed) as a raw entry list."""
    N = kind.N
    E = [[ZERO] * N for _ in range(N)]
    E[i - 1][j - 1] = ONE
    return E


def _from_terms(kind: AlgebraKind, terms: Iterable[tuple[int, int, int]]) -> GMatrix:
    N = kind.N
    E = [[ZERO] * N for _ in range(N)]
    for i, j, c in terms:
        E[i - 1][j - 1] = E[i - 1][j - 1] + c
    return GMatrix(kind, E)


def _root_terms(kind: AlgebraKind, root: RootLabel):
    m, fam = kind.m, kind.family
    sup = root.support()
    if fam == "C":
        if len(sup) == 1:
            i, c = sup[0]
            return [(i, i + m, 1)] if c > 0 else [(i + m, i, 1)]
        (i, ci), (j, cj) = sup
        if ci > 0 and cj < 0:
            return [(i, j, 1), (j + m, i + m, -1)]
        if ci < 0 and cj > 0:
            return [(j, i, 1), (i + m, j + m, -1)]
        if ci > 0:
            return [(i, j + m, 1), (j, i + m, 1)]
        return [(i + m, j, 1), (j + m, i, 1)]
    if fam == "B" and len(sup) == 1:
        i, c = sup[0]
        if c > 0:
            return [(1, i + m + 1, 1), (i + 1, 1, -1)]
        return [(1, i + 1, 1), (i + m + 1, 1, -1)]
    s = 1 if fam == "B" else 0
    (i, ci), (j, cj) = sup  # i < j
    if ci > 0 and cj < 0:
        terms = [(i, j, 1), (m + j, m + i, -1)]
    elif ci < 0 and cj > 0:
        terms = [(j, i, 1), (m + i, m + j, -1)]
    elif ci > 0:
        terms = [(i, m + j, 1), (j, m + i, -1)]
    else:
        terms = [(m + i, j, 1), (m + j, i, -1)]
    return [(a + s, b + s, c) for a, b, c in terms]


def root_vector(kind: AlgebraKind, root: RootLabel | str) -> GMatrix:
    if isinstance(root, str):
        root = RootLabel.parse(kind.m, root)
    if len(root.vec) != kind.m or not is_valid_root(kind.family, root):
        raise InvalidRoot(f"{root} is not a root of type {kind.family}{kind.m}")
    return _cached_root_vector(kind, root)


@lru_cache(maxsize=None)
def _cached_root_vector(kind, root):
    return _from_terms(kind, _root_terms(kind, root))


def cartan_basis(kind: AlgebraKind) -> list[GMatrix]:
    """h_i = E_ii - E_{i+m,i+m} in the e_i block."""
    s, m = kind.offset, kind.m
    return [_from_terms(kind, [(i + s, i + s, 1), (i + m + s, i + m + s, -1)]) for i in range(1, m + 1)]


def cartan_element(kind: AlgebraKind, x: Sequence) -> GMatrix:
    """diag(x, -x), with a leading 0 for type B."""
    vals = ([ZERO] if kind.family == "B" else []) + [_coerce(v) for v in x] + [-_coerce(v) for v in x]
    return GMatrix.diag(kind, vals)


@lru_cache(maxsize=None)
def basis(kind: AlgebraKind) -> tuple:
    """Frozen ordered basis: positive roots, negative roots, Cartan."""
    return tuple([root_vector(kind, r) for r in roots_of(kind)] + cartan_basis(kind))


@lru_cache(maxsize=None)
def _keys(kind: AlgebraKind) -> tuple:
    """One distinguishing entry per basis element; the positions are pairwise distinct."""
    keys = []
    for b in basis(kind):
        i, j, x = b.nonzeros()[0]
        keys.append((i, j, x))
    assert len({(i, j) for i, j, _ in keys}) == len(keys)
    return tuple(keys)


def coordinates(M: GMatrix) -> list:
    """Coordinates of a member in the frozen basis."""
    return [M.entries[i][j] / x for i, j, x in _keys(M.kind)]


def from_coordinates(kind: AlgebraKind, coords: Sequence) -> GMatrix:
    out = GMatrix.zero(kind)
    N = kind.N
    E = [[ZERO] * N for _ in range(N)]
    for c, b in zip(coords, basis(kind)):
        if c == 0:
            continue
        for i, j, x in b.nonzeros():
            E[i][j] = E[i][j] + c * x
    return GMatrix(kind, E)


def bracket(X: GMatrix, Y: GMatrix) -> GMatrix:
    X._check(Y)
    return X @ Y - Y @ X


def derive_form(kind: AlgebraKind) -> list[list]:
    """Solve for Phi with M^T Phi + Phi M = 0 on every basis element.

    The solution space is one dimensional; it is normalized so that its first
    nonzero entry in row-major order is 1.
    """
    N = kind.N
    idx = lambda a, b: a * N + b
    rows = []
    for M in basis(kind):
        E = M.entries
        for i in range(N):
            for j in range(N):
                row = [ZERO] * (N * N)
                # (M^T Phi)_ij = sum_k M_ki Phi_kj ; (Phi M)_ij = sum_k Phi_ik M_kj
                for k in range(N):
                    if E[k][i] != 0:
                        row[idx(k, j)] = row[idx(k, j)] + E[k][i]
                    if E[k][j] != 0:
                        row[idx(i, k)] = row[idx(i, k)] + E[k][j]
                if any(x != 0 for x in row):
                    rows.append(row)
    ns = linalg.nullspace(rows, N * N)
    if len(ns) != 1:
        raise ArithmeticError(f"expected a unique invariant form, found {len(ns)}")
    v = ns[0]
    lead = next(x for x in v if x != 0)
    v = [x / lead for x in v]
    return [v[i * N:(i + 1) * N] for i in range(N)]


def frozen_form(kind: AlgebraKind) -> list[list]:
    """The invariant form of each realization, as derived by derive_form."""
    m, N = kind.m, kind.N
    F = [[ZERO] * N for _ in range(N)]
    if kind.family == "C":
        for i in range(m):
            F[i][i + m] = ONE
            F[i + m][i] = -ONE
    elif kind.family == "D":
        for i in range(m):
            F[i][i + m] = ONE
            F[i + m][i] = ONE
    else:
        F[0][0] = ONE
        for i in range(m):
            F[1 + i][1 + i + m] = ONE
            F[1 + i + m][1 + i] = ONE
    return F


def is_member(M: GMatrix) -> bool:
    F = frozen_form(M.kind)
    A = matmul([list(r) for r in zip(*M.entries)], F)
    B = matmul(F, M.entries)
    return all(a + b == 0 for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def ad_matrix(X: GMatrix) -> list[list]:
    """Matrix of Y -> [X, Y] in the frozen basis; column k is the image of basis[k]."""
    if not is_member(X):
        raise NotMember("ad_matrix needs an element of the algebra")
    cols = [coordinates(bracket(X, b)) for b in basis(X.kind)]
    return linalg.transpose(cols)


def charpoly_exact(M: GMatrix) -> Poly:
    """det(tI - M) by Faddeev-LeVerrier; only divisions by integers occur."""
    return charpoly_entries(M.entries)


def charpoly_entries(E) -> Poly:
    N = len(E)
    real = all(isinstance(x, GaussianRational) and x.im == 0 for r in E for x in r)
    if real:
        A = [[x.re for x in r] for r in E]
        zero = Fraction(0)
    else:
        A = [[x for x in r] for r in E]
        zero = ZERO
    Anz = [[(j, x) for j, x in enumerate(r) if x != 0] for r in A]
    c = [zero] * (N + 1)
    c[N] = zero + 1
    Mk = [[zero] * N for _ in range(N)]  # M_0 = 0
    for k in range(1, N + 1):
        # M_k = A M_{k-1} + c_{N-k+1} I
        new = [[zero] * N for _ in range(N)]
        for i in range(N):
            row = new[i]
            for l, a in Anz[i]:
                src = Mk[l]
                for j in range(N):
                    if src[j] != 0:
                        row[j] = row[j] + a * src[j]
            row[i] = row[i] + c[N - k + 1]
        Mk = new
        # c_{N-k} = -tr(A M_k) / k
        tr = zero
        for i in range(N):
            for l, a in Anz[i]:
                tr = tr + a * Mk[l][i]
        c[N - k] = -tr / k
    return Poly(c)


def pfaffian_exact(M) -> GaussianRational:
    """Pfaffian by skew-symmetric Gaussian elimination over Q(i)."""
    E = M.entries if isinstance(M, GMatrix) else M
    n = len(E)
    A = [[GaussianRational.coerce(x) if not isinstance(x, GaussianRational) else x for x in r] for r in E]
    for i in range(n):
        for j in range(n):
            if A[i][j] != -A[j][i]:
                raise NotAntisymmetric("matrix is not antisymmetric")
    if n % 2:
        raise OddDimension("Pfaffian of an odd-dimensional matrix")
    pf = ONE
    for k in range(0, n, 2):
        piv = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
        if piv is None:
            return ZERO
        if piv != k + 1:
            # swap index k+1 and piv in rows and columns
            A[k + 1], A[piv] = A[piv], A[k + 1]
            for r in A:
                r[k + 1], r[piv] = r[piv], r[k + 1]
            pf = -pf
        p = A[k][k + 1]
        pf = pf * p
        # eliminate couplings of k and k+1 with the remaining indices
        for i in range(k + 2, n):
            f = A[k][i] / p
            g = A[k + 1][i] / p
            if f == 0 and g == 0:
                continue
            # congruence: row_i -= f*row_{k+1} - g*row_k  (and same on columns)
            rk, rk1 = A[k], A[k + 1]
            for j in range(n):
                A[i][j] = A[i][j] - f * rk1[j] + g * rk[j]
            for r in A:
                r[i] = r[i] - f * r[k + 1] + g * r[k]
    return pf


def pfaffian_numeric(M) -> complex:
    """Pfaffian of a complex antisymmetric matrix, largest-pivot elimination."""
    E = M.entries if isinstance(M, GMatrix) else M
    A = np.array([[complex(x) for x in r] for r in E], dtype=complex)
    n = A.shape[0]
    if n % 2:
        raise OddDimension("Pfaffian of an odd-dimensional matrix")
    pf = 1.0 + 0j
    for k in range(0, n, 2):
        piv = k + 1 + int(np.argmax(np.abs(A[k, k + 1:])))
        if A[k, piv] == 0:
            return 0j
        if piv != k + 1:
            A[[k + 1, piv]] = A[[piv, k + 1]]
            A[:, [k + 1, piv]] = A[:, [piv, k + 1]]
            pf = -pf
        p = A[k, k + 1]
        pf *= p
        if k + 2 < n:
            f = A[k, k + 2:] / p
            g = A[k + 1, k + 2:] / p
            A[k + 2:, :] += -np.outer(f, A[k + 1]) + np.outer(g, A[k])
            A[:, k + 2:] += -np.outer(A[:, k + 1], f) + np.outer(A[:, k], g)
    return complex(pf)


def calibration_pfaffian(m: int) -> GaussianRational:
    """Constant c with c * Pf(Phi h) = prod x_i on type-D Cartan elements.

    Evaluated on h = diag(1..m, -1..-m)."""
    kind = AlgebraKind("D", m)
    h = cartan_element(kind, list(range(1, m + 1)))
    F = frozen_form(kind)
    pf = pfaffian_exact(matmul(F, h.entries))
    prod = 1
    for k in range(1, m + 1):
        prod *= k
    return GaussianRational.coerce(prod) / pf
