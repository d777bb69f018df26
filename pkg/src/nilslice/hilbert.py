"""The map from a slice fiber to Hilb^n of a surface, seen through its support."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .kernel import NilsliceError, Poly, divide_exact, interpolate, roots, w_from_u
from .slices import OrbitIndex, SliceCoords
from .spectra import (
    SpectralClass,
    ideal_polys,
    q_tau,
    surface,
    y_of_tau,
)
from .transversality import jacobian_numeric, reduced_coefficients

log = logging.getLogger(__name__)


class RepeatedSupport(NilsliceError):
    pass


class WrongKind(NilsliceError):
    pass


@dataclass(frozen=True)
class IdealPoint:
    """(A_hat, D_hat, U_hat, V_hat) with U_hat, V_hat reduced mod A_hat.

    For type D the reduction is applied to W_hat (U_hat = t W_hat - y) and
    V_hat; for type B the first two entries are a_hat and hat(t^2 d).
    """

    idx: OrbitIndex
    Ahat: Poly
    Dhat: Poly
    Uhat: Poly
    Vhat: Poly

    @property
    def What(self) -> Poly:
        return w_from_u(self.Uhat)[0]

    @property
    def y(self):
        return w_from_u(self.Uhat)[1]

    def degrees_ok(self) -> bool:
        n = self.Ahat.deg
        first = self.What if self.idx.family == "D" else self.Uhat
        return first.deg <= n - 1 and self.Vhat.deg <= n - 1

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in ("Ahat", "Dhat", "Uhat", "Vhat")}


def _numerator(idx: OrbitIndex, tau_P: Poly, U: Poly, V: Poly, Q: Poly = None, y=None) -> Poly:
    """Left side whose quotient by A_hat is D_hat."""
    if idx.family == "C":
        return tau_P + U * U + (V * V).shift(1)
    if idx.family == "B":
        return tau_P.shift(1) + U * U + (V * V).shift(1)
    W = w_from_u(U)[0]
    return Q + V * V + (W * W).shift(1) - W * (2 * y)


def _check_exact(rem: Poly, num: Poly, tol: float = 1e-8) -> None:
    if not rem.is_zero() and rem.max_abs() > tol * max(1.0, num.max_abs()):
        raise ArithmeticError(f"fiber relation not divisible by A_hat (remainder {rem.max_abs():.3g})")


def ideal_point_from_coords(idx: OrbitIndex, c: SliceCoords) -> IdealPoint:
    Ah, Dh, Uh, Vh = ideal_polys(idx, c)
    if idx.family == "D":
        W, y = w_from_u(Uh)
        Wr = divide_exact(W, Ah)[1]
        Vr = divide_exact(Vh, Ah)[1]
        Ur = Wr.shift(1) - Poly([y])
        # D_hat for the reduced pair, from Q + V^2 + t W^2 - 2 y W = A D
        full = Vh * Vh + (W * W).shift(1) - W * (2 * y) - Ah * Dh  # = -Q
        num = Vr * Vr + (Wr * Wr).shift(1) - Wr * (2 * y) - full
        Dr, rem = divide_exact(num, Ah)
        _check_exact(rem, num)
        return IdealPoint(idx, Ah, Dr, Ur, Vr)
    Ur = divide_exact(Uh, Ah)[1]
    Vr = divide_exact(Vh, Ah)[1]
    # P (or t P) = A D - U^2 - t V^2 is fixed by c, so recompute D for the reduced pair
    base = Ah * Dh - Uh * Uh - (Vh * Vh).shift(1)
    num = base + Ur * Ur + (Vr * Vr).shift(1)
    Dr, rem = divide_exact(num, Ah)
    _check_exact(rem, num)
    return IdealPoint(idx, Ah, Dr, Ur, Vr)


@dataclass(frozen=True)
class SupportPoints:
    """The n surface points (u, v, z); for type D read (v, w, z)."""

    points: tuple

    def canonical(self) -> list:
        return sorted(self.points, key=lambda p: (round(p[2].real, 12), round(p[2].imag, 12),
                                                  p[0].real, p[0].imag, p[1].real, p[1].imag))

    def distance(self, other: "SupportPoints") -> float:
        """Smallest max-norm discrepancy over matchings of the two multisets."""
        a, b = list(self.points), list(other.points)
        if len(a) != len(b):
            return float("inf")
        best = float("inf")
        for perm in itertools.permutations(range(len(b))):
            d = max((max(abs(x - y) for x, y in zip(a[i], b[j])) for i, j in enumerate(perm)), default=0.0)
            best = min(best, d)
        return best

    def scale(self) -> float:
        return max([1.0] + [abs(x) for p in self.points for x in p])

    def to_json(self) -> list:
        return [[[x.real, x.imag] for x in p] for p in self.canonical()]


def support_points(ip: IdealPoint, tol: float = 1e-10) -> SupportPoints:
    if ip.Ahat.deg < 1:
        return SupportPoints(())
    zs = roots(ip.Ahat, tol)
    first = ip.What if ip.idx.family == "D" else ip.Uhat
    F, V = first.to_complex(), ip.Vhat.to_complex()
    if ip.idx.family == "D":
        pts = [(complex(V(z)), complex(F(z)), complex(z)) for z in zs]
    else:
        pts = [(complex(F(z)), complex(V(z)), complex(z)) for z in zs]
    return SupportPoints(tuple(pts))


def surface_residuals(sp: SupportPoints, tau: SpectralClass, family: str) -> list[float]:
    S = surface(family, tau)
    return [S.relative_residual(u, v, z) for u, v, z in sp.points]


def round_trip(sp: SupportPoints, tau: SpectralClass, idx: OrbitIndex, sep: float = 1e-6) -> IdealPoint:
    """Rebuild the ideal point from its support: A_hat from the z_k, the
    reduced U_hat (W_hat) and V_hat by interpolation, D_hat by division."""
    zs = [p[2] for p in sp.points]
    scale = max([1.0] + [abs(z) for z in zs])
    for i in range(len(zs)):
        for j in range(i + 1, len(zs)):
            if abs(zs[i] - zs[j]) < sep * scale:
                raise RepeatedSupport("support has a repeated point")
    A = Poly.from_roots(zs)
    if not zs:
        z = Poly([])
        if idx.family == "D":
            y = complex(y_of_tau(tau))
            return IdealPoint(idx, A, _numerator(idx, None, Poly([-y]), z, q_tau(tau).to_complex(), y), Poly([-y]), z)
        return IdealPoint(idx, A, _numerator(idx, tau.P().to_complex(), z, z), z, z)
    if idx.family == "D":
        W, cond_w = interpolate(zs, [p[1] for p in sp.points])
        V, cond_v = interpolate(zs, [p[0] for p in sp.points])
        y = complex(y_of_tau(tau))
        U = W.shift(1) - Poly([y])
        num = _numerator(idx, None, U, V, q_tau(tau).to_complex(), y)
    else:
        U, cond_w = interpolate(zs, [p[0] for p in sp.points])
        V, cond_v = interpolate(zs, [p[1] for p in sp.points])
        num = _numerator(idx, tau.P().to_complex(), U, V)
    log.debug("interpolation condition %.3g / %.3g", cond_w, cond_v)
    D, _ = divide_exact(num, A)
    return IdealPoint(idx, A, D, U, V)


def ideal_distance(a: IdealPoint, b: IdealPoint) -> float:
    """Max relative coefficient deviation over the four polynomials."""
    worst = 0.0
    for name in ("Ahat", "Dhat", "Uhat", "Vhat"):
        p, q = getattr(a, name).to_complex(), getattr(b, name).to_complex()
        n = max(len(p.coeffs), len(q.coeffs))
        scale = max(1.0, p.max_abs(), q.max_abs())
        for k in range(n):
            worst = max(worst, abs(complex(p[k]) - complex(q[k])) / scale)
    return worst


def b_fiber_partner(c: SliceCoords) -> SliceCoords:
    if c.idx.family != "B":
        raise WrongKind("the Z/2 partner exists in type B only")
    return SliceCoords(c.idx, c.a, c.y, c.z, c.d, -c.a0, -c.d0)


def project_to_fiber(idx: OrbitIndex, c: SliceCoords, target: Sequence, iters: int = 60, tol: float = 1e-13) -> SliceCoords:
    """Gauss-Newton on the m coefficient equations, minimum-norm steps."""
    x = np.array([complex(v) for v in c.flat()])
    goal = np.array([complex(v) for v in target])
    for _ in range(iters):
        cur = SliceCoords.from_flat(idx, list(x))
        F = np.array([complex(v) for v in reduced_coefficients(idx, cur)]) - goal
        if np.max(np.abs(F)) < tol * max(1.0, np.max(np.abs(goal))):
            return cur
        J = jacobian_numeric(idx, cur)
        step = np.linalg.lstsq(J, F, rcond=None)[0]
        x = x - step
    raise ArithmeticError("projection onto the fiber did not converge")


def same_fiber_sample(idx: OrbitIndex, c: SliceCoords, rng: np.random.Generator, size: float = 0.5) -> SliceCoords:
    """Perturb c and project back onto the fiber of c."""
    target = reduced_coefficients(idx, c)
    x = np.array([complex(v) for v in c.flat()])
    x = x + size * (rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size))
    return project_to_fiber(idx, SliceCoords.from_flat(idx, list(x)), target)
