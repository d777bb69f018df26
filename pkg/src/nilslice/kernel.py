"""Exact scalars over Q(i), dense univariate polynomials, and root finding."""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


class NilsliceError(Exception):
    """Base class for every error raised by this package."""


class OddCoefficient(NilsliceError):
    def __init__(self, index: int):
        super().__init__(f"nonzero coefficient at odd degree {index}")
        self.index = index


class NonConvergence(NilsliceError):
    pass


ComplexF = complex


class GaussianRational:
    """re + im*i with both parts held as reduced fractions."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        elif isinstance(re, str):
            g = GaussianRational.parse(re)
            re, im = g.re, g.im + Fraction(im)
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _new(re: Fraction, im: Fraction) -> "GaussianRational":
        g = object.__new__(GaussianRational)
        object.__setattr__(g, "re", re)
        object.__setattr__(g, "im", im)
        return g

    @staticmethod
    def coerce(x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return GaussianRational._new(Fraction(x), Fraction(0))
        if isinstance(x, str):
            return GaussianRational.parse(x)
        raise TypeError(f"cannot make a Gaussian rational from {x!r}")

    _TERM = re.compile(r"([+-]?)([0-9]+(?:/[0-9]+)?)?(\*?i)?")

    @staticmethod
    def parse(text: str) -> "GaussianRational":
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty scalar")
        re_part, im_part = Fraction(0), Fraction(0)
        pos = 0
        while pos < len(s):
            mt = GaussianRational._TERM.match(s, pos)
            if mt is None or mt.end() == pos:
                raise ValueError(f"bad scalar {text!r}")
            sign, num, imag = mt.groups()
            if num is None and imag is None:
                raise ValueError(f"bad scalar {text!r}")
            v = Fraction(num) if num is not None else Fraction(1)
            if sign == "-":
                v = -v
            if imag:
                im_part += v
            else:
                re_part += v
            pos = mt.end()
        return GaussianRational._new(re_part, im_part)

    def __repr__(self):
        return f"GaussianRational({str(self)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if abs(self.im) == 1 else f"{abs(self.im)}*i"
        if self.re == 0:
            return ("-" if self.im < 0 else "") + im
        return f"{self.re}{'-' if self.im < 0 else '+'}{im}"

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (complex, float)):
            return complex(self) == other
        return NotImplemented

    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._new(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __neg__(self):
        return GaussianRational._new(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._new(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._new(self.re + other, self.im)
        if isinstance(other, (complex, float)):
            return complex(self) + other
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, GaussianRational):
            return GaussianRational._new(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._new(self.re - other, self.im)
        if isinstance(other, (complex, float)):
            return complex(self) - other
        return NotImplemented

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            a, b, c, d = self.re, self.im, other.re, other.im
            if b == 0:
                return GaussianRational._new(a * c, a * d)
            if d == 0:
                return GaussianRational._new(a * c, b * c)
            return GaussianRational._new(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return GaussianRational._new(self.re * other, self.im * other)
        if isinstance(other, (complex, float)):
            return complex(self) * other
        return NotImplemented

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        return GaussianRational._new(self.re / n, -self.im / n)

    def __truediv__(self, other):
        if isinstance(other, GaussianRational):
            if other.im == 0:
                if other.re == 0:
                    raise ZeroDivisionError("division by zero")
                return GaussianRational._new(self.re / other.re, self.im / other.re)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return GaussianRational._new(self.re / other, self.im / other)
        if isinstance(other, (complex, float)):
            return complex(self) / other
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational.coerce(other) * self.inverse()
        if isinstance(other, (complex, float)):
            return other / complex(self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def _sympy_(self):
        import sympy

        return sympy.Rational(self.re.numerator, self.re.denominator) + sympy.I * sympy.Rational(
            self.im.numerator, self.im.denominator
        )


ZERO = GaussianRational._new(Fraction(0), Fraction(0))
ONE = GaussianRational._new(Fraction(1), Fraction(0))
I = GaussianRational._new(Fraction(0), Fraction(1))


def i_power(k: int) -> GaussianRational:
    return (ONE, I, -ONE, -I)[k % 4]


def _scalar(x):
    """Exact inputs become GaussianRational; floats and complexes stay numeric."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational._new(Fraction(x), Fraction(0))
    if isinstance(x, (float, np.floating)):
        return complex(float(x))
    if isinstance(x, (complex, np.complexfloating)):
        return complex(x)
    if isinstance(x, Rational):
        return GaussianRational.coerce(x)
    # symbolic coefficients (sympy expressions) pass through untouched
    return x


def is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


class Poly:
    """Dense univariate polynomial; coeffs[k] multiplies t**k.

    Coefficients are GaussianRational for the exact layer. A polynomial with
    any float/complex coefficient is numeric and carries Python complexes.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [_scalar(c) for c in coeffs]
        if any(isinstance(c, complex) for c in cs):
            cs = [complex(c) for c in cs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def t(cls) -> "Poly":
        return cls([0, 1])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c=1) -> "Poly":
        return cls([0] * k + [c])

    @classmethod
    def from_roots(cls, roots: Sequence) -> "Poly":
        p = cls([1])
        for r in roots:
            p = p * cls([-r, 1])
        return p

    @property
    def deg(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs)

    def __getitem__(self, k: int):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO if self.is_exact() else 0j

    def lc(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction, GaussianRational, complex)):
            return self == Poly([other])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __add__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly([x + y for x, y in zip(a, b)] + list(a[len(b):]))

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _as_poly(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = _scalar(other)
            return Poly([x * c for x in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return Poly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                if y == 0:
                    continue
                out[i + j] = out[i + j] + x * y
        return Poly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([1])
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def scale(self, c) -> "Poly":
        return self * c

    def shift(self, k: int) -> "Poly":
        """Multiply by t**k."""
        if not self.coeffs:
            return self
        return Poly([0] * k + list(self.coeffs))

    def reflect(self) -> "Poly":
        """p(-t)."""
        return Poly([c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs)])

    def compose_square(self) -> "Poly":
        """p(t**2)."""
        out = []
        for c in self.coeffs:
            out += [c, 0]
        return Poly(out)

    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        lc = self.lc()
        return Poly([c / lc for c in self.coeffs])

    def to_complex(self) -> "Poly":
        return Poly([complex(c) for c in self.coeffs])

    def max_abs(self) -> float:
        return max((abs(complex(c)) for c in self.coeffs), default=0.0)

    def to_json(self) -> list:
        if self.is_exact():
            return [str(c) for c in self.coeffs]
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: list) -> "Poly":
        return cls(
            [GaussianRational.parse(c) if isinstance(c, str) else complex(*c) for c in data]
        )


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    return Poly([x])


def _negligible(c, scale: float, tol: float) -> bool:
    if c == 0:
        return True
    if is_exact(c) or not isinstance(c, (complex, float, int)):
        return False
    return abs(c) <= tol * scale


def even_part(q: Poly, tol: float = 1e-9) -> Poly:
    """q_hat with q_hat(t**2) = q(t). Odd coefficients must vanish
    (up to tol relative to max|c| when they are floating point)."""
    scale = None
    for k in range(1, len(q.coeffs), 2):
        if q.coeffs[k] != 0:
            if scale is None:
                scale = max(1.0, max(abs(complex(c)) for c in q.coeffs if is_exact(c) or isinstance(c, (complex, float, int))))
            if not _negligible(q.coeffs[k], scale, tol):
                raise OddCoefficient(k)
    return Poly(q.coeffs[::2])


def odd_part_over_t(q: Poly) -> Poly:
    """(q(t) - q(-t)) / (2t), which has only even powers."""
    return Poly([c if k % 2 == 0 else 0 for k, c in enumerate(q.coeffs[1:])])


def uv_from_b(B: Poly, m: int) -> tuple[Poly, Poly]:
    """U = i^(m-1)/2 (B(t)+B(-t)),  V = i^m/(2t) (B(t)-B(-t))."""
    even = Poly([c if k % 2 == 0 else 0 for k, c in enumerate(B.coeffs)])
    U = even * i_power(m - 1)
    V = odd_part_over_t(B) * i_power(m)
    return U, V


def b_from_uv(U: Poly, V: Poly, m: int) -> Poly:
    """Inverse of uv_from_b."""
    return U * i_power(1 - m) + V.shift(1) * i_power(-m)


def w_from_u(U_hat: Poly):
    """Split U_hat = t*W_hat - y."""
    y = -U_hat[0]
    W = Poly(U_hat.coeffs[1:])
    return W, y


def divide_exact(P: Poly, A: Poly) -> tuple[Poly, Poly]:
    """Long division P = A*Q + R with deg R < deg A."""
    if A.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    rem = list(P.coeffs)
    da = A.deg
    lc = A.lc()
    if len(rem) - 1 < da:
        return Poly(), P
    quot = [0] * (len(rem) - da)
    for k in range(len(rem) - 1 - da, -1, -1):
        c = rem[k + da] / lc
        quot[k] = c
        if c == 0:
            continue
        for j, a in enumerate(A.coeffs):
            rem[k + j] = rem[k + j] - c * a
    return Poly(quot), Poly(rem[:da])


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd over Q(i) by the Euclidean algorithm."""
    while not q.is_zero():
        p, q = q, divide_exact(p, q)[1]
    return p.monic() if not p.is_zero() else p


def squarefree_decomposition(p: Poly) -> list[tuple[Poly, int]]:
    """Yun's algorithm: p = lc * prod f_k**k with f_k squarefree and coprime."""
    out = []
    dp = p.derivative()
    a = poly_gcd(p, dp)
    b = divide_exact(p, a)[0]
    c = divide_exact(dp, a)[0]
    d = c - b.derivative()
    k = 1
    while b.deg > 0:
        a = poly_gcd(b, d)
        b = divide_exact(b, a)[0]
        c = divide_exact(d, a)[0]
        if a.deg > 0:
            out.append((a.monic(), k))
        d = c - b.derivative()
        k += 1
    return out


def _simple_roots(cs: np.ndarray) -> np.ndarray:
    # cs is high-to-low for numpy
    z = np.roots(cs) if len(cs) > 1 else np.array([], dtype=complex)
    z = z.astype(complex)
    dcs = np.polyder(cs)
    for _ in range(3):
        f = np.polyval(cs, z)
        df = np.polyval(dcs, z)
        ok = np.abs(df) > 0
        step = np.zeros_like(z)
        step[ok] = f[ok] / df[ok]
        z = z - step
    return z


def roots(p: Poly, tol: float = 1e-10) -> list[complex]:
    """All deg(p) roots, repeated by multiplicity, sorted by (re, im).

    Exact input is first split into squarefree factors so repeated roots come
    out as exact repeats rather than a perturbed cluster.
    """
    if p.deg < 1:
        raise ValueError("roots of a constant polynomial")
    if p.is_exact():
        pieces = squarefree_decomposition(p)
    else:
        pieces = [(p, 1)]
    found: list[complex] = []
    for f, k in pieces:
        cs = np.array([complex(c) for c in reversed(f.coeffs)], dtype=complex)
        z = _simple_roots(cs)
        if not np.all(np.isfinite(z)):
            raise NonConvergence("root iteration produced non-finite values")
        found.extend(list(z) * k)
    found = _cluster(found, tol)
    pc = p.to_complex()
    mags = [abs(c) for c in pc.coeffs]
    for z in found:
        # backward error: residual against the size of the terms summed
        size = sum(c * abs(z) ** k for k, c in enumerate(mags))
        if abs(pc(z)) / max(size, 1.0) >= 10 * tol:
            raise NonConvergence(f"residual too large at root {z}")
    return sorted(found, key=lambda z: (z.real, z.imag))


def _cluster(zs: list[complex], tol: float) -> list[complex]:
    """Single-linkage clusters of radius tol, each replaced by its mean."""
    n = len(zs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(zs[i] - zs[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [0j] * n
    for members in groups.values():
        mean = sum(zs[i] for i in members) / len(members)
        for i in members:
            out[i] = complex(mean)
    return out


def interpolate(nodes: Sequence[complex], values: Sequence[complex]) -> tuple[Poly, float]:
    """Degree < len(nodes) interpolant in monomial form, via barycentric weights.

    Returns the polynomial and the Lebesgue-style condition estimate
    sum |w_k f_k| / |sum w_k f_k| taken over the coefficient assembly.
    """
    z = np.asarray(nodes, dtype=complex)
    f = np.asarray(values, dtype=complex)
    n = len(z)
    if n == 0:
        return Poly(), 1.0
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    if np.any(np.abs(diff) == 0):
        raise ZeroDivisionError("repeated interpolation node")
    w = 1.0 / np.prod(diff, axis=1)
    full = np.array([1.0 + 0j])
    for zk in z:
        full = np.convolve(full, np.array([1.0, -zk]))
    coeffs = np.zeros(n, dtype=complex)
    mags = np.zeros(n)
    for k in range(n):
        # full(t) / (t - z_k), synthetic division, high-to-low
        q = np.zeros(n, dtype=complex)
        acc = 0j
        for j in range(n):
            acc = acc * z[k] + full[j]
            q[j] = acc
        coeffs += w[k] * f[k] * q
        mags += np.abs(w[k] * f[k] * q)
    cond = float(np.max(mags) / max(np.max(np.abs(coeffs)), 1e-300))
    return Poly(list(coeffs[::-1])), cond
