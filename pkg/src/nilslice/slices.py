"""Nilpotent representatives X_n, JM triples, slices S_n and the C*-action."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from numbers import Rational
from typing import Sequence

from .kernel import ONE, ZERO, GaussianRational, NilsliceError
from .liealg import (
    AlgebraKind,
    GMatrix,
    basis,
    bracket,
    coordinates,
    is_member,
    root_vector,
)
from . import linalg


class InvalidIndex(NilsliceError):
    pass


class ShapeMismatch(NilsliceError):
    pass


class NonDiagonalH(NilsliceError):
    pass


class OddWeight(NilsliceError):
    pass


@dataclass(frozen=True)
class OrbitIndex:
    kind: AlgebraKind
    n: int

    def __post_init__(self):
        m, n, fam = self.kind.m, self.n, self.kind.family
        ok = n >= 0
        if fam == "C":
            ok = ok and 2 * n <= m
        elif fam == "D":
            ok = ok and m >= 2 and 2 * n + 1 <= m
        else:
            ok = ok and n >= 1 and 2 * (n - 1) + 1 <= m
        if not ok:
            raise InvalidIndex(f"n={n} is not valid for {self.kind}")

    @classmethod
    def of(cls, family: str, m: int, n: int) -> "OrbitIndex":
        return cls(AlgebraKind(family, m), n)

    @property
    def m(self) -> int:
        return self.kind.m

    @property
    def family(self) -> str:
        return self.kind.family

    @property
    def modified(self) -> bool:
        """The type-C boundary case n = m/2 uses the modified slice."""
        return self.family == "C" and 2 * self.n == self.m and self.n > 0

    def partition(self) -> list[int]:
        m, n = self.m, self.n
        if self.family == "C":
            parts = [2 * (m - n), 2 * n]
        elif self.family == "D":
            parts = [2 * (m - n) - 1, 2 * n + 1]
        else:
            parts = [2 * (m - n + 1) - 1, 2 * (n - 1) + 1, 1]
        return sorted([p for p in parts if p > 0], reverse=True)

    def lengths(self) -> tuple[int, int, int, int]:
        m, n = self.m, self.n
        if self.family == "C":
            return n, n, n, m - n
        if self.family == "D":
            return n, n, n + 1, m - n - 1
        return n - 1, n - 1, n, m - n

    @property
    def dim(self) -> int:
        """Number of slice coordinates, m + 2n."""
        return sum(self.lengths()) + (2 if self.family == "B" else 0)

    def d_part(self) -> "OrbitIndex":
        """The type-D index whose slice is included into a type-B slice."""
        return OrbitIndex(AlgebraKind("D", self.m), self.n - 1)

    def __str__(self):
        return f"{self.kind}/n={self.n}"

    def to_json(self):
        return {"kind": self.family, "m": self.m, "n": self.n}


def valid_indices(family: str, m: int) -> list[OrbitIndex]:
    out = []
    for n in range(0, m + 1):
        try:
            out.append(OrbitIndex.of(family, m, n))
        except (InvalidIndex, ValueError):
            pass
    return out


def _g(x):
    if isinstance(x, (GaussianRational, complex)):
        return x
    if isinstance(x, float):
        return complex(x)
    if isinstance(x, (int, Rational, str)):
        return GaussianRational.coerce(x)
    return x  # symbolic


@dataclass(frozen=True)
class SliceCoords:
    """Coordinates (a, y, z, d) of a slice point, with a0, d0 for type B."""

    idx: OrbitIndex
    a: tuple = ()
    y: tuple = ()
    z: tuple = ()
    d: tuple = ()
    a0: object = None
    d0: object = None

    def __post_init__(self):
        for name in ("a", "y", "z", "d"):
            object.__setattr__(self, name, tuple(_g(v) for v in getattr(self, name)))
        la, ly, lz, ld = self.idx.lengths()
        if (len(self.a), len(self.y), len(self.z), len(self.d)) != (la, ly, lz, ld):
            raise ShapeMismatch(
                f"{self.idx} needs lengths {(la, ly, lz, ld)}, got "
                f"{(len(self.a), len(self.y), len(self.z), len(self.d))}"
            )
        if self.idx.family == "B":
            object.__setattr__(self, "a0", _g(self.a0 if self.a0 is not None else 0))
            object.__setattr__(self, "d0", _g(self.d0 if self.d0 is not None else 0))
        elif self.a0 is not None or self.d0 is not None:
            raise ShapeMismatch("a0/d0 only exist in type B")

    @classmethod
    def zero(cls, idx: OrbitIndex) -> "SliceCoords":
        return cls.from_flat(idx, [0] * idx.dim)

    @classmethod
    def from_flat(cls, idx: OrbitIndex, values: Sequence) -> "SliceCoords":
        values = list(values)
        if len(values) != idx.dim:
            raise ShapeMismatch(f"{idx} has {idx.dim} coordinates, got {len(values)}")
        la, ly, lz, ld = idx.lengths()
        cuts = [0, la, la + ly, la + ly + lz, la + ly + lz + ld]
        parts = [values[cuts[k]:cuts[k + 1]] for k in range(4)]
        extra = {}
        if idx.family == "B":
            extra = {"a0": values[-2], "d0": values[-1]}
        return cls(idx, *parts, **extra)

    def flat(self) -> list:
        out = list(self.a) + list(self.y) + list(self.z) + list(self.d)
        if self.idx.family == "B":
            out += [self.a0, self.d0]
        return out

    @staticmethod
    def names(idx: OrbitIndex) -> list[str]:
        la, ly, lz, ld = idx.lengths()
        out = [f"a{i}" for i in range(1, la + 1)] + [f"y{i}" for i in range(1, ly + 1)]
        out += [f"z{i}" for i in range(1, lz + 1)] + [f"d{i}" for i in range(1, ld + 1)]
        if idx.family == "B":
            out += ["a0", "d0"]
        return out

    def replace_flat(self, k: int, value) -> "SliceCoords":
        v = self.flat()
        v[k] = value
        return SliceCoords.from_flat(self.idx, v)

    def to_json(self) -> dict:
        fmt = lambda x: str(x) if isinstance(x, GaussianRational) else [x.real, x.imag]
        out = {
            "kind": self.idx.family,
            "m": self.idx.m,
            "n": self.idx.n,
            "a": [fmt(v) for v in self.a],
            "y": [fmt(v) for v in self.y],
            "z": [fmt(v) for v in self.z],
            "d": [fmt(v) for v in self.d],
        }
        if self.idx.family == "B":
            out["a0"], out["d0"] = fmt(self.a0), fmt(self.d0)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "SliceCoords":
        idx = OrbitIndex.of(data["kind"], int(data["m"]), int(data["n"]))
        parse = lambda x: GaussianRational.parse(x) if isinstance(x, str) else complex(*x)
        extra = {}
        if idx.family == "B":
            extra = {"a0": parse(data["a0"]), "d0": parse(data["d0"])}
        return cls(idx, *[[parse(v) for v in data[k]] for k in "ayzd"], **extra)


def _rv(kind: AlgebraKind, text: str) -> GMatrix:
    return root_vector(kind, text)


def _simple_chain(kind: AlgebraKind, skip: int) -> GMatrix:
    m = kind.m
    X = GMatrix.zero(kind)
    for i in range(1, m):
        if i != skip:
            X = X + _rv(kind, f"e{i}-e{i+1}")
    return X


@lru_cache(maxsize=None)
def nilpotent_rep(idx: OrbitIndex) -> GMatrix:
    """X_n for types C and D; the inclusion of X_{n-1} for type B."""
    kind, m, n = idx.kind, idx.m, idx.n
    if idx.family == "C":
        X = _simple_chain(kind, m - n) + _rv(kind, f"2e{m-n}")
        if n > 0:
            # at n = 0 the two corner terms coincide; the block display has one
            X = X + _rv(kind, f"2e{m}")
        return X
    if idx.family == "D":
        X = _simple_chain(kind, m - n) + _rv(kind, f"e{m-n-1}+e{m-n}")
        if n > 0:
            X = X + _rv(kind, f"e{m-n}+e{m}")
        return X
    return include(nilpotent_rep(idx.d_part()))


def include(Y: GMatrix) -> GMatrix:
    """so(2m) -> so(2m+1), Y -> diag(0, Y)."""
    kind = AlgebraKind("B", Y.kind.m)
    N = kind.N
    E = [[ZERO] * N for _ in range(N)]
    for i, j, x in Y.nonzeros():
        E[i + 1][j + 1] = x
    return GMatrix(kind, E)


def _blocks(kind: AlgebraKind, lower_left, upper_left=None) -> GMatrix:
    """Assemble [[P, 0], [L, -P^T]] with m x m blocks (types C, D)."""
    m = kind.m
    N = kind.N
    E = [[ZERO] * N for _ in range(N)]
    for i in range(m):
        for j in range(m):
            E[i + m][j] = lower_left[i][j]
            if upper_left is not None:
                E[i][j] = upper_left[i][j]
                E[i + m][j + m] = -upper_left[j][i]
    return GMatrix(kind, E)


def _zeros(r, c):
    return [[ZERO] * c for _ in range(r)]


def _slice_C(idx: OrbitIndex, c: SliceCoords) -> GMatrix:
    m, n = idx.m, idx.n
    kind = idx.kind
    M = _zeros(m, m)
    a, y, z, d = c.a, c.y, c.z, c.d
    if not idx.modified:
        for k in range(1, m - n + 1):
            M[k - 1][k - 1] = d[m - n - k]
        for k in range(1, n + 1):
            M[m - n + k - 1][m - n + k - 1] = a[n - k]
        for j in range(1, n + 1):
            M[0][m - n + j - 1] += y[j - 1]
            M[m - n + j - 1][0] += y[j - 1]
            M[j][m - 1] += z[j - 1]
            M[m - 1][j] += z[j - 1]
        return nilpotent_rep(idx) + _blocks(kind, M)
    # n = m/2: the last diagonal d-entry carries d_1 - z_n^2 and z_n moves onto X_{e_m - e_n}
    for k in range(1, n + 1):
        M[k - 1][k - 1] = d[n - k]
    M[n - 1][n - 1] = M[n - 1][n - 1] - z[n - 1] * z[n - 1]
    for k in range(1, n + 1):
        M[n + k - 1][n + k - 1] = a[n - k]
    for j in range(1, n + 1):
        M[0][n + j - 1] += y[j - 1]
        M[n + j - 1][0] += y[j - 1]
    for j in range(1, n):
        M[j][m - 1] += z[j - 1]
        M[m - 1][j] += z[j - 1]
    return nilpotent_rep(idx) + _blocks(kind, M) + _rv(kind, f"e{m}-e{n}") * z[n - 1]


def _slice_D(idx: OrbitIndex, c: SliceCoords) -> GMatrix:
    m, n = idx.m, idx.n
    k = m - n
    a, y, z, d = c.a, c.y, c.z, c.d
    Md = _zeros(k, k)
    for r in range(1, k):
        Md[r - 1][r] = d[k - r - 1]
        Md[r][r - 1] = -d[k - r - 1]
    Ma = _zeros(n, n)
    for r in range(1, n):
        Ma[r - 1][r] = a[n - r]
        Ma[r][r - 1] = -a[n - r]
    Mzd = _zeros(k, k)
    for j in range(n + 1):
        Mzd[k - 1][j] += z[j]
    Mzd[k - 1][k - 2] += d[0]
    top = _zeros(m, m)
    C = _zeros(m, m)
    for i in range(k):
        for j in range(k):
            top[i][j] = -Mzd[i][j]
            C[i][j] = Md[i][j]
    if n > 0:
        top[k - 1][k + n - 1] = a[0]
        for j in range(n):
            C[0][k + j] = y[j]
            C[k + j][0] = -y[j]
        for i in range(n):
            for j in range(n):
                C[k + i][k + j] = Ma[i][j]
    return nilpotent_rep(idx) + _blocks(idx.kind, C, top)


def b_extra_root(idx: OrbitIndex) -> GMatrix:
    """Direction carrying a0 in type B: X_{-e_{m-n+2}}, or -X_{e_m} when n = 1."""
    m, n = idx.m, idx.n
    if n >= 2:
        return _rv(idx.kind, f"-e{m-n+2}")
    return -_rv(idx.kind, f"e{m}")


def _slice_B(idx: OrbitIndex, c: SliceCoords) -> GMatrix:
    didx = idx.d_part()
    inner = SliceCoords(didx, c.a, c.y, c.z, c.d)
    S = include(_slice_D(didx, inner))
    return S + _rv(idx.kind, "-e1") * c.d0 + b_extra_root(idx) * c.a0


def slice_point(idx: OrbitIndex, c: SliceCoords) -> GMatrix:
    if c.idx != idx:
        raise ShapeMismatch(f"coordinates for {c.idx} used with {idx}")
    if idx.family == "C":
        return _slice_C(idx, c)
    if idx.family == "D":
        return _slice_D(idx, c)
    return _slice_B(idx, c)


def slice_directions(idx: OrbitIndex) -> list[GMatrix]:
    """Tangent vectors of the slice at X_n, one per coordinate (the space V_n).

    The slice is at most quadratic in its coordinates, so the symmetric
    difference with step 1 is the exact derivative."""
    out = []
    zero = [0] * idx.dim
    for k in range(idx.dim):
        plus, minus = list(zero), list(zero)
        plus[k], minus[k] = 1, -1
        diff = slice_point(idx, SliceCoords.from_flat(idx, plus)) - slice_point(
            idx, SliceCoords.from_flat(idx, minus)
        )
        out.append(diff * GaussianRational("1/2"))
    return out


@dataclass(frozen=True)
class JMTriple:
    H: GMatrix
    Nplus: GMatrix
    Nminus: GMatrix

    def relations_hold(self) -> bool:
        return (
            bracket(self.H, self.Nplus) == self.Nplus * 2
            and bracket(self.H, self.Nminus) == self.Nminus * (-2)
            and bracket(self.Nplus, self.Nminus) == self.H
        )


def _h_diagonal(idx: OrbitIndex) -> list[int]:
    m, n = idx.m, idx.n
    if idx.family == "C":
        l = lambda k: [2 * k - 1 - 2 * j for j in range(k)]
        top = l(m - n) + l(n)
        return top + [-h for h in top]
    if idx.family == "D":
        alpha = [2 * (m - n - 1 - j) for j in range(m - n)]
        beta = [2 * (n - j) for j in range(n)]
        top = alpha + beta
        return top + [-h for h in top]
    return [0] + _h_diagonal(idx.d_part())


def _nminus_C(idx: OrbitIndex) -> GMatrix:
    """N_n^- from the block display with m_k and the two corner entries."""
    m, n = idx.m, idx.n
    N = 2 * m
    E = [[ZERO] * N for _ in range(N)]

    def put_mk(k, off):
        for j in range(1, k):
            v = GaussianRational(j * (2 * k - j))
            E[off + j][off + j - 1] = v
            E[m + off + j][m + off + j - 1] = -v

    put_mk(m - n, 0)
    put_mk(n, m - n)
    E[m + m - n - 1][m - n - 1] = GaussianRational((m - n) ** 2)
    if n > 0:
        E[m + m - 1][m - 1] = GaussianRational(n * n)
    return GMatrix(idx.kind, E)


def _solve_nminus(X: GMatrix, H: GMatrix) -> GMatrix:
    """Solve [X, N] = H for N in the -2 eigenspace of ad H."""
    kind = X.kind
    cands = []
    for b in basis(kind):
        if bracket(H, b) == b * (-2):
            cands.append(b)
    cols = [coordinates(bracket(X, b)) for b in cands]
    rows = linalg.transpose(cols)
    sol = linalg.solve(rows, coordinates(H))
    out = GMatrix.zero(kind)
    for s, b in zip(sol, cands):
        if s != 0:
            out = out + b * s
    return out


@lru_cache(maxsize=None)
def jm_triple(idx: OrbitIndex) -> JMTriple:
    """JM triple with diagonal H and N+ = X_n.

    Type C uses the displayed N^-; the other kinds (and C if the display
    ever failed) solve the linear system [X_n, N^-] = H."""
    X = nilpotent_rep(idx)
    H = GMatrix.diag(idx.kind, [GaussianRational(h) for h in _h_diagonal(idx)])
    if idx.family == "C":
        T = JMTriple(H, X, _nminus_C(idx))
        if T.relations_hold():
            return T
    if bracket(H, X) != X * 2:
        raise ArithmeticError(f"diagonal H does not grade X_n for {idx}")
    return JMTriple(H, X, _solve_nminus(X, H))


def _diag_ints(H: GMatrix) -> list[int]:
    for i, j, _ in H.nonzeros():
        if i != j:
            raise NonDiagonalH("H must be diagonal")
    out = []
    for i in range(H.N):
        h = H.entries[i][i]
        if not isinstance(h, GaussianRational) or h.im != 0 or h.re.denominator != 1:
            raise OddWeight("H entries must be integers")
        out.append(int(h.re))
    if len({h % 2 for h in out}) > 1:
        raise OddWeight("H entries of mixed parity give half-integer powers of r")
    return out


def lambda_act_matrix(r, Y: GMatrix, H: GMatrix) -> GMatrix:
    """r * Ad(r^{-H/2}) Y: entry (i, j) is scaled by r^(1 + (h_j - h_i)/2)."""
    r = _g(r)
    if r == 0:
        raise ValueError("r must be nonzero")
    h = _diag_ints(H)
    E = [list(row) for row in Y.entries]
    for i, j, x in Y.nonzeros():
        E[i][j] = x * r ** (1 + (h[j] - h[i]) // 2)
    return GMatrix(Y.kind, E)


@lru_cache(maxsize=None)
def weight_table(idx: OrbitIndex) -> tuple[int, ...]:
    """Exponent w_k with lambda_r scaling coordinate k by r^w_k, read off the matrix action."""
    h = _diag_ints(jm_triple(idx).H)
    out = []
    for k, V in enumerate(slice_directions(idx)):
        ws = {1 + (h[j] - h[i]) // 2 for i, j, _ in V.nonzeros()}
        if len(ws) != 1:
            raise ArithmeticError(f"coordinate {k} of {idx} is not a weight vector")
        out.append(ws.pop())
    return tuple(out)


def printed_weight_table_C(idx: OrbitIndex) -> tuple[int, ...]:
    """Type-C weights as printed: (2i, m-i+1, m+n-i+1, 2j)."""
    m, n = idx.m, idx.n
    la, ly, lz, ld = idx.lengths()
    return tuple(
        [2 * i for i in range(1, la + 1)]
        + [m - i + 1 for i in range(1, ly + 1)]
        + [m + n - i + 1 for i in range(1, lz + 1)]
        + [2 * j for j in range(1, ld + 1)]
    )


def lambda_act_coords(idx: OrbitIndex, r, c: SliceCoords) -> SliceCoords:
    r = _g(r)
    w = weight_table(idx)
    return SliceCoords.from_flat(idx, [x * r ** wk for x, wk in zip(c.flat(), w)])


def jordan_type(X: GMatrix) -> list[int]:
    """Jordan block sizes of a nilpotent matrix from the ranks of its powers."""
    N = X.N
    ranks = [N]
    P = X
    while True:
        rk = linalg.bareiss_rank([list(r) for r in P.entries])
        ranks.append(rk)
        if rk == 0:
            break
        P = P @ X
    # number of blocks of size >= k is rank(X^{k-1}) - rank(X^k)
    ge = [ranks[k - 1] - ranks[k] for k in range(1, len(ranks))]
    sizes = []
    for k in range(len(ge)):
        exact = ge[k] - (ge[k + 1] if k + 1 < len(ge) else 0)
        sizes += [k + 1] * exact
    return sorted(sizes, reverse=True)
