"""Adjoint quotient, closed-form slice characteristic polynomials, fibers and surfaces.

The charpoly identity factors the characteristic polynomial of a slice point
through A, D, B; the fiber relation rewrites it as P + U^2 + t V^2 = A D.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from .kernel import (
    ONE,
    ZERO,
    GaussianRational,
    NilsliceError,
    OddCoefficient,
    Poly,
    divide_exact,
    even_part,
    i_power,
    roots,
    uv_from_b,
    w_from_u,
)
from .liealg import (
    AlgebraKind,
    GMatrix,
    calibration_pfaffian,
    charpoly_exact,
    frozen_form,
    matmul,
    pfaffian_exact,
    pfaffian_numeric,
)
from .slices import OrbitIndex, SliceCoords, slice_point, root_vector, include, nilpotent_rep


class ParityViolation(NilsliceError):
    pass


class InconsistentSign(NilsliceError):
    pass


class ReductionFailure(NilsliceError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


T = Poly.t()

# Constants of the corrected type-B formula
#   a = t^2 A + alpha a0^2,  d = D + delta d0^2 / t^2,  b = B - a0 d0 / t
# with alpha = (-1)^n / 2 and delta = 2 (-1)^(m-n).


def b_alpha(n: int) -> GaussianRational:
    return GaussianRational((-1) ** n) / 2


def b_delta(m: int, n: int) -> GaussianRational:
    return GaussianRational(2 * (-1) ** (m - n))


@dataclass(frozen=True)
class ClosedFormPolys:
    """A, D, B of the slice; for type B also a, dt = t^2 d and bt = t b."""

    idx: OrbitIndex
    A: Poly
    D: Poly
    B: Poly
    a: Optional[Poly] = None
    dt: Optional[Poly] = None
    bt: Optional[Poly] = None

    def chi(self) -> Poly:
        """Right side of the charpoly identity in its verified form."""
        m = self.idx.m
        s = (-1) ** m
        if self.idx.family == "C":
            return self.A * self.D - self.B * self.B.reflect() * s
        if self.idx.family == "D":
            return (self.A * self.D).shift(2) + self.B * self.B.reflect() * s
        # t chi = a dt - (-1)^m bt(t) bt(-t); the right side vanishes at 0
        top = self.a * self.dt - self.bt * self.bt.reflect() * s
        return Poly(top.coeffs[1:])

    def chi_printed(self) -> Poly:
        """Right side exactly as printed (type C has the opposite sign on B B(-t))."""
        m = self.idx.m
        if self.idx.family == "C":
            return self.A * self.D + self.B * self.B.reflect() * (-1) ** m
        return self.chi()


def _A(a: Sequence, n: int) -> Poly:
    cs = [0] * (2 * n + 1)
    cs[2 * n] = 1
    for i in range(1, n + 1):
        cs[2 * (n - i)] = a[i - 1] * (-1) ** i
    return Poly(cs)


def _closed_C(idx: OrbitIndex, c: SliceCoords) -> ClosedFormPolys:
    m, n = idx.m, idx.n
    A = _A(c.a, n)
    k = m - n
    cs = [0] * (2 * k + 1)
    cs[2 * k] = 1
    for j in range(1, k + 1):
        cs[2 * (k - j)] = c.d[j - 1] * (-1) ** j
    D = Poly(cs)
    B = Poly(list(c.y)) - Poly([z * (-1) ** (i) for i, z in enumerate(c.z)]).shift(n)
    return ClosedFormPolys(idx, A, D, B)


def _closed_D(idx: OrbitIndex, c: SliceCoords) -> ClosedFormPolys:
    m, n = idx.m, idx.n
    A = _A(c.a, n)
    k = m - n
    cs = [0] * max(2 * (k - 2) + 1, 1)
    for j in range(1, k):
        cs[2 * (k - 1 - j)] = c.d[j - 1] * 4 * (-1) ** (j - 1)
    D = Poly(cs)
    inner = Poly([z * (-1) ** i for i, z in enumerate(c.z)]) + Poly.monomial(k, (-1) ** k)
    B = Poly(list(c.y)) - inner.shift(n)
    return ClosedFormPolys(idx, A, D, B)


def _closed_B(idx: OrbitIndex, c: SliceCoords) -> ClosedFormPolys:
    m, n = idx.m, idx.n
    didx = idx.d_part()
    inner = _closed_D(didx, SliceCoords(didx, c.a, c.y, c.z, c.d))
    a = inner.A.shift(2) + Poly([c.a0 * c.a0 * b_alpha(n)])
    dt = inner.D.shift(2) + Poly([c.d0 * c.d0 * b_delta(m, n)])
    bt = inner.B.shift(1) - Poly([c.a0 * c.d0])
    return ClosedFormPolys(idx, inner.A, inner.D, inner.B, a, dt, bt)


def closed_form_polys(idx: OrbitIndex, c: SliceCoords) -> ClosedFormPolys:
    if idx.family == "C":
        return _closed_C(idx, c)
    if idx.family == "D":
        return _closed_D(idx, c)
    return _closed_B(idx, c)


def charpoly_identity_check(idx: OrbitIndex, c: SliceCoords) -> Poly:
    """charpoly(S) minus the closed form of the charpoly identity; zero when it holds."""
    return charpoly_exact(slice_point(idx, c)) - closed_form_polys(idx, c).chi()


def charpoly_identity_check_printed(idx: OrbitIndex, c: SliceCoords) -> Poly:
    """Same residual against the printed formulas (and, for type B, the printed slice)."""
    if idx.family == "B":
        S = printed_slice_point_B(idx, c)
        return charpoly_exact(S) - printed_closed_B(idx, c)
    return charpoly_exact(slice_point(idx, c)) - closed_form_polys(idx, c).chi_printed()


def printed_slice_point_B(idx: OrbitIndex, c: SliceCoords) -> GMatrix:
    """i(S_{n-1}) + a0 X_{-e_1} + d0 X_{-e_{m-n+1}}, as printed."""
    from .slices import _slice_D

    didx = idx.d_part()
    S = include(_slice_D(didx, SliceCoords(didx, c.a, c.y, c.z, c.d)))
    return S + root_vector(idx.kind, "-e1") * c.a0 + root_vector(idx.kind, f"-e{idx.m-idx.n+1}") * c.d0


def printed_closed_B(idx: OrbitIndex, c: SliceCoords) -> Poly:
    """t a d + (-1)^m t b(t) b(-t) with a = t^2A + (-1)^n a0^2, d = D + (-1)^(m-n) d0^2/t^2, b = B + a0 d0/t."""
    m, n = idx.m, idx.n
    f = _closed_B(idx, c)
    a = f.A.shift(2) + Poly([c.a0 * c.a0 * (-1) ** n])
    dt = f.D.shift(2) + Poly([c.d0 * c.d0 * (-1) ** (m - n)])
    bt = f.B.shift(1) + Poly([c.a0 * c.d0])
    top = a * dt - bt * bt.reflect() * (-1) ** m
    return Poly(top.coeffs[1:])


# ---------------------------------------------------------------- spectral data


def reduced_charpoly(family: str, chi: Poly) -> Poly:
    """P with chi(t) = P(t^2) (types C, D) or chi(t) = t P(t^2) (type B)."""
    try:
        if family == "B":
            if chi[0] != 0 and (chi.is_exact() or abs(complex(chi[0])) > 1e-9 * max(1.0, chi.max_abs())):
                raise ParityViolation("type-B characteristic polynomial must vanish at 0")
            return even_part(Poly(chi.coeffs[1:]))
        return even_part(chi)
    except OddCoefficient as e:
        raise ParityViolation(str(e)) from e


@dataclass(frozen=True)
class SpectralClass:
    """A point of h/W: the multiset mu of squared eigenvalues, plus p in type D."""

    kind: AlgebraKind
    mu: tuple
    pSign: object = None
    exact: Optional[Poly] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        mu = tuple(sorted((complex(x) for x in self.mu), key=lambda z: (z.real, z.imag)))
        object.__setattr__(self, "mu", mu)

    @classmethod
    def from_mu(cls, kind: AlgebraKind, mu: Sequence, pSign=None) -> "SpectralClass":
        return cls(kind, tuple(mu), pSign)

    def P(self) -> Poly:
        """P_tau(t) = prod (t - mu_i); exact when the class came from an exact matrix."""
        if self.exact is not None:
            return self.exact
        return Poly.from_roots(list(self.mu))

    def scaled(self, r2) -> "SpectralClass":
        return SpectralClass(self.kind, tuple(x * r2 for x in self.mu), None)

    def to_json(self) -> dict:
        out = {"kind": self.kind.family, "m": self.kind.m, "mu": [[z.real, z.imag] for z in self.mu]}
        if self.pSign is not None:
            p = complex(self.pSign)
            out["pSign"] = [p.real, p.imag]
        return out


def pfaffian_invariant(S: GMatrix):
    """p = c_m Pf(Phi S), normalized so that p = prod x_i on diag(x, -x)."""
    F = frozen_form(S.kind)
    FS = matmul(F, S.entries)
    if all(isinstance(x, (GaussianRational, int)) for r in FS for x in r):
        return calibration_pfaffian(S.kind.m) * pfaffian_exact(FS)
    return complex(calibration_pfaffian(S.kind.m)) * pfaffian_numeric(FS)


def spectral_class_of(S: GMatrix, tol: float = 1e-10) -> SpectralClass:
    chi = charpoly_exact(S)
    P = reduced_charpoly(S.kind.family, chi)
    mu = roots(P, tol) if P.deg >= 1 else []
    p = pfaffian_invariant(S) if S.kind.family == "D" else None
    return SpectralClass(S.kind, tuple(mu), p, exact=P)


@lru_cache(maxsize=None)
def y_multiple(idx: OrbitIndex) -> GaussianRational:
    """Constant kappa with y = kappa * y_1 (n >= 1) or y = kappa * z_1 (n = 0), type D.

    Read off by evaluating the chain B -> U -> (W, y) on the unit coordinate."""
    if idx.family != "D":
        raise ValueError("y is defined for type D only")
    names = SliceCoords.names(idx)
    k = names.index("y1" if idx.n >= 1 else "z1")
    unit = [0] * idx.dim
    unit[k] = 1
    base = _y_of(idx, SliceCoords.zero(idx))
    return _y_of(idx, SliceCoords.from_flat(idx, unit)) - base


def _y_of(idx: OrbitIndex, c: SliceCoords):
    B = closed_form_polys(idx, c).B
    U, _ = uv_from_b(B, idx.m)
    return w_from_u(even_part(U))[1]


@lru_cache(maxsize=None)
def omega(m: int) -> GaussianRational:
    """Constant with y = omega * p(tau) on every type-D slice; omega^2 = (-1)^(m+1)."""
    idx = OrbitIndex.of("D", m, 0)
    c = SliceCoords.from_flat(idx, [1] + [0] * (idx.dim - 1))  # z1 = 1
    return _y_of(idx, c) / pfaffian_invariant(slice_point(idx, c))


def q_tau(tau: SpectralClass, tol: float = 1e-9) -> Poly:
    """Q_tau = (P_tau - (-1)^m p^2) / t."""
    if tau.kind.family != "D":
        raise ValueError("Q_tau is defined for type D only")
    m = tau.kind.m
    P = tau.P()
    p = tau.pSign if tau.pSign is not None else 0
    c0 = p * p * (-1) ** m
    gap = P[0] - c0
    if abs(complex(gap)) > tol * max(1.0, abs(complex(P[0]))):
        raise InconsistentSign(f"P(0) = {P[0]} but (-1)^m p^2 = {c0}")
    # P(0) equals (-1)^m p^2 up to tol, so the shift drops exactly that constant
    return Poly(P.coeffs[1:])


def ideal_polys(idx: OrbitIndex, c: SliceCoords):
    """(A_hat, D_hat, U_hat, V_hat) straight from the closed forms.

    Type B returns (a_hat, hat(t^2 d), U_hat, V_hat) built from a and bt."""
    f = closed_form_polys(idx, c)
    m = idx.m
    if idx.family == "C":
        U, V = uv_from_b(f.B, m + 1)
        return even_part(f.A), even_part(f.D), even_part(U), even_part(V)
    if idx.family == "D":
        U, V = uv_from_b(f.B, m)
        return even_part(f.A), even_part(f.D), even_part(U), even_part(V)
    U, V = uv_from_b(f.bt, m + 1)
    return even_part(f.a), even_part(f.dt), even_part(U), even_part(V)


def y_of_tau(tau: SpectralClass):
    return omega(tau.kind.m) * tau.pSign


def fiber_residual(idx: OrbitIndex, c: SliceCoords, tau: SpectralClass) -> Poly:
    """Left minus right side of the fiber equation for tau.

    C: P + U^2 + t V^2 - A D
    D: t (Q + V^2 + t W^2 - 2 y W - A D) + (y_c - y), with y = omega p and
       U = t W - y_c; the constant slot carries the sign relation y_c = omega p
    B: t P + U^2 + t V^2 - a hat(t^2 d)
    """
    Ah, Dh, Uh, Vh = ideal_polys(idx, c)
    P = tau.P()
    if idx.family == "C":
        return P + Uh * Uh + (Vh * Vh).shift(1) - Ah * Dh
    if idx.family == "D":
        Q = q_tau(tau)
        W, yc = w_from_u(Uh)
        y = y_of_tau(tau)
        return (Q + Vh * Vh + (W * W).shift(1) - W * (2 * y) - Ah * Dh).shift(1) + Poly([yc - y])
    return P.shift(1) + Uh * Uh + (Vh * Vh).shift(1) - Ah * Dh


# ------------------------------------------------------------------ surfaces


@dataclass(frozen=True)
class SurfaceSpec:
    """F(u, v, z) = 0 with F = R(z) + u^2 + z v^2 - lin * v.

    SigmaC: R = P_tau,  SigmaB: R = t P_tau,  GammaD: R = Q_tau, lin = 2y,
    where for GammaD the two variables are (v, w) in place of (u, v)."""

    family: str
    R: Poly
    lin: object = 0

    def __call__(self, u, v, z):
        return self.R(z) + u * u + z * v * v - self.lin * v

    def relative_residual(self, u, v, z) -> float:
        terms = [complex(self.R(z)), complex(u * u), complex(z * v * v), complex(self.lin * v)]
        scale = max(1.0, max(abs(x) for x in terms))
        return abs(complex(self(u, v, z))) / scale

    def describe(self) -> str:
        var = ("v", "w") if self.family == "GammaD" else ("u", "v")
        R = " + ".join(f"({c})*z^{k}" for k, c in enumerate(self.R.coeffs) if c != 0) or "0"
        lin = f" - ({self.lin})*{var[1]}" if self.lin != 0 else ""
        return f"{R} + {var[0]}^2 + z*{var[1]}^2{lin}"


def surface(family: str, tau: SpectralClass) -> SurfaceSpec:
    if family == "C":
        return SurfaceSpec("SigmaC", tau.P())
    if family == "B":
        return SurfaceSpec("SigmaB", tau.P().shift(1))
    Q = q_tau(tau)
    return SurfaceSpec("GammaD", Q, 2 * y_of_tau(tau))


def is_regular(tau: SpectralClass, tol: float = 1e-9) -> bool:
    mu = tau.mu
    for i in range(len(mu)):
        for j in range(i + 1, len(mu)):
            if abs(mu[i] - mu[j]) <= tol:
                return False
    if tau.kind.family in ("C", "B"):
        return all(abs(x) > tol for x in mu)
    return True


# --------------------------------------------------------------- Kleinian check

EXPECTED_TYPE = {
    "C": lambda m: f"D{m + 1}",
    "D": lambda m: f"D{m}",
    "B": lambda m: f"A{2 * m - 1}",
}


def fiber_equations(idx: OrbitIndex, symbols):
    """Coefficients of the charpoly identity at tau = 0, as sympy expressions."""
    import sympy

    f = closed_form_polys(idx, SliceCoords.from_flat(idx, list(symbols)))
    if idx.family == "B":
        lhs = f.a * f.dt - f.bt * f.bt.reflect() * (-1) ** idx.m
        target = Poly.monomial(idx.kind.N + 1)
    else:
        lhs = f.chi()
        target = Poly.monomial(idx.kind.N)
    diff = lhs - target
    eqs = [sympy.expand(sympy.sympify(x)) for x in diff.coeffs]
    return [e for e in eqs if e != 0]


def _eliminate_linear(eqs, prefer, forced=None):
    """Solve equations linear in one variable with a constant coefficient and
    substitute; an equation c*v^k sets v = 0 (the reduced fiber)."""
    import sympy

    eqs = list(eqs)
    forced = forced if forced is not None else []
    progress = True
    while progress and len(eqs) > 1:
        progress = False
        for k, e in enumerate(eqs):
            fs = e.free_symbols
            if len(fs) == 1 and len(sympy.Poly(e, *fs).monoms()) == 1:
                v = fs.pop()
                forced.append(v)
                eqs = [sympy.expand(x.subs(v, 0)) for j, x in enumerate(eqs) if j != k]
                eqs = [x for x in eqs if x != 0]
                progress = True
                break
        if progress:
            continue
        for v in prefer:
            for k, e in enumerate(eqs):
                if not e.has(v):
                    continue
                pe = sympy.Poly(e, v)
                if pe.degree() != 1:
                    continue
                lead = pe.coeffs()[0]
                if not lead.is_number:
                    continue
                sol = sympy.solve(e, v)[0]
                eqs = [sympy.expand(x.subs(v, sol)) for j, x in enumerate(eqs) if j != k]
                eqs = [x for x in eqs if x != 0]
                progress = True
                break
            if progress:
                break
    return eqs


def _match_normal_form(f, gens):
    """Return 'A<k>' or 'D<k>' if f is c1*Z^e + c2*X^2 + c3*Y^2 (or with Z*X^2)."""
    import sympy

    P = sympy.Poly(f, *gens)
    monos = P.monoms()
    if len(monos) != 3:
        return None
    for perm in __import__("itertools").permutations(range(3)):
        X, Y, Z = perm
        def has(ex):
            return tuple(ex) in monos
        unit = lambda i, p: tuple(p if j == i else 0 for j in range(3))
        y2 = unit(Y, 2)
        if not has(y2):
            continue
        rest = [mm for mm in monos if mm != y2]
        zpow = [mm for mm in rest if all(mm[j] == 0 for j in range(3) if j != Z)]
        if len(zpow) != 1:
            continue
        e = zpow[0][Z]
        other = [mm for mm in rest if mm != zpow[0]][0]
        if other == unit(X, 2) and e >= 2:
            return f"A{e - 1}"
        zx2 = tuple(2 if j == X else (1 if j == Z else 0) for j in range(3))
        if other == zx2 and e >= 2:
            return f"D{e + 1}"
    return None


def _complete_squares(f, gens):
    """One square completion in a variable whose quadratic coefficient is a
    constant, or a single variable dividing the linear coefficient."""
    import sympy

    for x in gens:
        P = sympy.Poly(f, x)
        if P.degree() != 2:
            continue
        q = P.coeff_monomial(x**2)
        L = P.coeff_monomial(x)
        R = P.coeff_monomial(1)
        if L == 0:
            continue
        if q.is_number:
            return sympy.expand(q * x**2 + R - L**2 / (4 * q))
        if q.is_Mul or q.is_Symbol:
            quo, rem = sympy.div(L, q, *gens)
            if rem == 0:
                return sympy.expand(q * x**2 + R - sympy.expand(quo * L) / 4)
    return None


def _canonical(t: str) -> str:
    # D3 and A3 are the same singularity
    return "A3" if t == "D3" else t


def kleinian_check(family: str, m: int) -> dict:
    """Reduce the n = 1, tau = 0 fiber to an A_k / D_k normal form."""
    import sympy

    idx = OrbitIndex.of(family, m, 1)
    names = SliceCoords.names(idx)
    syms = sympy.symbols(names)
    eqs = fiber_equations(idx, syms)
    prefer = [s for s in syms if s.name.startswith("d") and s.name != "d0"]
    prefer += [s for s in syms if s not in prefer]
    forced: list = []
    eqs = _eliminate_linear(eqs, prefer, forced)
    if len(eqs) != 1:
        raise ReductionFailure(f"expected one equation after elimination, got {len(eqs)}", eqs)
    f = eqs[0]
    gens = sorted(f.free_symbols, key=lambda s: names.index(s.name))
    if len(gens) != 3:
        raise ReductionFailure(f"surface equation in {len(gens)} variables", f)
    original = f
    found = _match_normal_form(f, gens)
    for _ in range(10):
        if found:
            break
        g = _complete_squares(f, gens)
        if g is None:
            break
        f = g
        found = _match_normal_form(f, gens)
    if not found:
        raise ReductionFailure("no normal form reached", f)
    expected = EXPECTED_TYPE[family](m)
    return {
        "kind": family,
        "m": m,
        "vanishing": [v.name for v in forced],
        "equation": str(original),
        "normal_form": str(f),
        "variables": [s.name for s in gens],
        "type": found,
        "expected": expected,
        "passed": _canonical(found) == _canonical(expected),
    }
