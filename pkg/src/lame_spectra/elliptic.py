"""Weierstrass elliptic functions in double precision.

All evaluations share one mechanism: reduce the argument into the period cell
around the origin, halve it until the Laurent expansion about 0 is accurate to
machine precision, then climb back with duplication formulas.

    wp(2u)       = (wp''/wp')^2 / 4 - 2 wp
    zeta(2u)     = 2 zeta(u) + wp''(u) / (2 wp'(u))
    sigma(2u)    = -wp'(u) sigma(u)^4

Periods come from the complex arithmetic-geometric mean.
"""
from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import (
    BranchPointError,
    DegenerateLatticeError,
    DomainError,
    LatticeProximityError,
    QuadratureError,
)

LATTICE_TOL = 1e-8
_N_LAURENT = 16  # c_2 .. c_16, i.e. wp through z**30
_ROUND = 10


class CubicRoots(NamedTuple):
    """Roots of 4w^3 - g2 w - g3, sorted by (real desc, imag desc)."""

    e1: complex
    e2: complex
    e3: complex
    degenerate: bool

    @property
    def roots(self) -> tuple[complex, complex, complex]:
        return (self.e1, self.e2, self.e3)


class Invariants(NamedTuple):
    g2_paper: complex
    g3_paper: complex
    g2_vieta: complex


def _sort_roots(roots):
    return sorted(roots, key=lambda r: (-round(r.real, _ROUND), -round(r.imag, _ROUND)))


def discriminant(g2: complex, g3: complex) -> complex:
    return complex(g2) ** 3 - 27 * complex(g3) ** 2


def is_degenerate(g2: complex, g3: complex, rtol: float = 1e-12) -> bool:
    g2, g3 = complex(g2), complex(g3)
    scale = abs(g2) ** 3 + 27 * abs(g3) ** 2
    if scale == 0.0:
        return True
    return abs(discriminant(g2, g3)) <= rtol * scale


def roots_from_invariants(g2: complex, g3: complex) -> CubicRoots:
    """Solve 4w^3 - g2 w - g3 = 0 by Cardano's formula plus Newton polishing.

    Repeated roots (g2^3 = 27 g3^2) are returned with ``degenerate=True``
    rather than raising; callers building a lattice must refuse them.
    """
    g2, g3 = complex(g2), complex(g3)
    if not (cmath.isfinite(g2) and cmath.isfinite(g3)):
        raise DomainError("invariants must be finite")
    # depressed form w^3 + p w + q = 0
    p = -g2 / 4
    q = -g3 / 4
    if p == 0 and q == 0:
        return CubicRoots(0j, 0j, 0j, True)
    disc = cmath.sqrt(q * q / 4 + p ** 3 / 27)
    cands = (-q / 2 + disc, -q / 2 - disc)
    u3 = max(cands, key=abs)
    u = u3 ** (1 / 3) if u3 != 0 else 0j
    omega = cmath.exp(2j * math.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        roots.append(uk - p / (3 * uk) if uk != 0 else 0j)

    def f(w):
        return 4 * w ** 3 - g2 * w - g3

    polished = []
    for w in roots:
        for _ in range(3):
            d = 12 * w * w - g2
            if abs(d) < 1e-300:
                break
            step = f(w) / d
            if not cmath.isfinite(step):
                break
            w_new = w - step
            if abs(f(w_new)) > abs(f(w)):
                break
            w = w_new
        polished.append(w)
    r = _sort_roots(polished)
    return CubicRoots(r[0], r[1], r[2], is_degenerate(g2, g3))


def invariants_from_roots(e1: complex, e2: complex, e3: complex) -> Invariants:
    """Both readings of the invariants for a zero-sum root triple.

    ``g2_paper`` is the literal 4(e1e2 + e2e3 + e1e3) (opposite sign);
    ``g2_vieta`` = -4(e1e2 + e2e3 + e1e3) is the value for which
    4(w-e1)(w-e2)(w-e3) = 4w^3 - g2 w - g3.
    """
    e1, e2, e3 = complex(e1), complex(e2), complex(e3)
    if abs(e1 + e2 + e3) > 1e-10 * max(1.0, abs(e1), abs(e2), abs(e3)):
        raise DomainError(f"roots must sum to zero, got sum {e1 + e2 + e3}")
    pair_sum = e1 * e2 + e2 * e3 + e1 * e3
    return Invariants(4 * pair_sum, 4 * e1 * e2 * e3, -4 * pair_sum)


def laurent_coefficients(g2: complex, g3: complex, n: int = _N_LAURENT) -> np.ndarray:
    """c_k with wp(z) = z^-2 + sum_{k>=2} c_k z^(2k-2); index k, c[0]=c[1]=0."""
    c = np.zeros(n + 1, dtype=complex)
    c[2] = g2 / 20
    if n >= 3:
        c[3] = g3 / 28
    for k in range(4, n + 1):
        acc = sum(c[m] * c[k - m] for m in range(2, k - 1))
        c[k] = 3 * acc / ((2 * k + 1) * (k - 3))
    return c


def _agm(a: complex, b: complex) -> complex:
    """Optimal complex AGM (Cremona-Thongjunthug sign choice)."""
    for _ in range(100):
        if abs(a - b) <= 1e-16 * abs(a):
            break
        a1 = (a + b) / 2
        b1 = cmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
    return a


def _gauss_reduce(b1: complex, b2: complex) -> tuple[complex, complex]:
    for _ in range(200):
        if abs(b1) > abs(b2):
            b1, b2 = b2, b1
        mu = round((b2 * b1.conjugate()).real / abs(b1) ** 2)
        if mu == 0:
            break
        b2 -= mu * b1
    if abs(b1) > abs(b2):
        b1, b2 = b2, b1
    return b1, b2


@dataclass(frozen=True)
class EllipticParams:
    """Lattice context: invariants, cubic roots, half-periods.

    Build through :meth:`from_invariants` or :meth:`from_roots`; both refuse
    degenerate lattices.
    """

    g2: complex
    g3: complex
    roots: tuple[complex, complex, complex]
    half_periods: tuple[complex, complex, complex]
    # reduced period basis and the matching quasi-periods eta(b) = zeta(z+b) - zeta(z)
    basis: tuple[complex, complex] = field(repr=False, compare=False)
    quasi: tuple[complex, complex] = field(repr=False, compare=False)
    laurent: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_invariants(cls, g2: complex, g3: complex) -> "EllipticParams":
        g2, g3 = complex(g2), complex(g3)
        cr = roots_from_invariants(g2, g3)
        if cr.degenerate:
            raise DegenerateLatticeError(
                f"g2^3 = 27 g3^2 for (g2, g3) = ({g2}, {g3}): repeated roots"
            )
        return cls._build(g2, g3, cr.roots)

    @classmethod
    def from_roots(cls, e1: complex, e2: complex, e3: complex) -> "EllipticParams":
        inv = invariants_from_roots(e1, e2, e3)
        if is_degenerate(inv.g2_vieta, inv.g3_paper):
            raise DegenerateLatticeError("repeated roots")
        roots = tuple(_sort_roots([complex(e1), complex(e2), complex(e3)]))
        return cls._build(inv.g2_vieta, inv.g3_paper, roots)

    @classmethod
    def _build(cls, g2, g3, roots):
        laurent = laurent_coefficients(g2, g3)
        for perm in itertools.permutations(roots):
            a = cmath.sqrt(perm[0] - perm[2])
            b = cmath.sqrt(perm[0] - perm[1])
            c = cmath.sqrt(perm[1] - perm[2])
            if abs(a - b) > abs(a + b):
                b = -b
            if abs(a - c) > abs(a + c):
                c = -c
            w1 = math.pi / _agm(a, b)
            w2 = 1j * math.pi / _agm(a, c)
            if abs((w2 / w1).imag) < 1e-8:
                continue
            b1, b2 = _gauss_reduce(w1, w2)
            halves = (b1 / 2, b2 / 2, -(b1 + b2) / 2)
            values = [_series_all(h, laurent, abs(b1))[0] for h in halves]
            matched = _match(values, roots)
            if matched is None:
                continue
            omegas = tuple(halves[i] for i in matched)
            eta1 = 2 * _series_all(b1 / 2, laurent, abs(b1))[2]
            eta2 = 2 * _series_all(b2 / 2, laurent, abs(b1))[2]
            return cls(g2, g3, tuple(roots), omegas, (b1, b2), (eta1, eta2), laurent)
        raise DegenerateLatticeError(f"could not determine periods for roots {roots}")

    @property
    def discriminant(self) -> complex:
        return discriminant(self.g2, self.g3)

    @property
    def shortest_period(self) -> float:
        return abs(self.basis[0])

    def reduce(self, z: complex) -> tuple[complex, int, int]:
        """z = z0 + m*b1 + n*b2 with z0 the representative nearest the origin."""
        b1, b2 = self.basis
        det = b1.real * b2.imag - b1.imag * b2.real
        x = (z.real * b2.imag - z.imag * b2.real) / det
        y = (b1.real * z.imag - b1.imag * z.real) / det
        m0, n0 = round(x), round(y)
        best = None
        for dm in (-1, 0, 1):
            for dn in (-1, 0, 1):
                m, n = m0 + dm, n0 + dn
                z0 = z - m * b1 - n * b2
                if best is None or abs(z0) < abs(best[0]):
                    best = (z0, m, n)
        return best


def _match(values, roots, tol=1e-6):
    scale = max(1.0, max(abs(r) for r in roots))
    for perm in itertools.permutations(range(3)):
        # perm[j] = index of the half-period whose value is root j
        if all(abs(values[perm[j]] - roots[j]) <= tol * scale for j in range(3)):
            return perm
    return None


def _series_all(z: complex, c: np.ndarray, radius: float):
    """(wp, wp', zeta, sigma) at z by halving + Laurent series + duplication.

    ``radius`` is the convergence radius of the Laurent series (shortest
    nonzero period). z must not be a lattice point other than 0 would be
    reached by halving only if |z| >= radius, which callers avoid by reducing.
    """
    K = len(c) - 1
    u = complex(z)
    n = 0
    while abs(u) > radius / 4 or abs(c[K]) * abs(u) ** (2 * K) > 1e-17:
        u /= 2
        n += 1
        if n > 200:
            break
    u2 = u * u
    # Horner in u^2 for sum_{k>=2} c_k u^(2k-2), etc.
    s_p = 0j
    s_dp = 0j
    s_z = 0j
    s_s = 0j
    for k in range(K, 1, -1):
        s_p = s_p * u2 + c[k]
        s_dp = s_dp * u2 + (2 * k - 2) * c[k]
        s_z = s_z * u2 + c[k] / (2 * k - 1)
        s_s = s_s * u2 + c[k] / (2 * k * (2 * k - 1))
    P = 1 / u2 + s_p * u2
    D = -2 / (u2 * u) + s_dp * u
    Z = 1 / u - s_z * u2 * u
    S = u * cmath.exp(-s_s * u2 * u2)
    g2 = 20 * c[2]
    for _ in range(n):
        P2 = 6 * P * P - g2 / 2
        ratio = P2 / D
        Z = 2 * Z + ratio / 2
        S = -D * S ** 4
        P_new = ratio * ratio / 4 - 2 * P
        D = ratio * (12 * P * D * D - P2 * P2) / (4 * D * D) - D
        P = P_new
    return P, D, Z, S


def _reduced(z: complex, p: EllipticParams, pole_check: bool):
    z = complex(z)
    if not cmath.isfinite(z):
        raise DomainError("z must be finite")
    z0, m, n = p.reduce(z)
    if pole_check and abs(z0) < LATTICE_TOL:
        raise LatticeProximityError(f"z = {z} lies within {LATTICE_TOL} of a lattice point")
    return z0, m, n


def wp(z: complex, p: EllipticParams) -> complex:
    """Weierstrass wp(z) for the lattice of ``p``."""
    z0, _, _ = _reduced(z, p, True)
    return complex(_series_all(z0, p.laurent, p.shortest_period)[0])


def wp_prime(z: complex, p: EllipticParams) -> complex:
    z0, _, _ = _reduced(z, p, True)
    return complex(_series_all(z0, p.laurent, p.shortest_period)[1])


def zeta(z: complex, p: EllipticParams) -> complex:
    """Weierstrass zeta; quasi-periodic, so the reduction shift is added back."""
    z0, m, n = _reduced(z, p, True)
    val = _series_all(z0, p.laurent, p.shortest_period)[2]
    return complex(val + m * p.quasi[0] + n * p.quasi[1])


def sigma(z: complex, p: EllipticParams) -> complex:
    """Weierstrass sigma (entire); exact zero on lattice points."""
    z0, m, n = _reduced(z, p, False)
    if z0 == 0:
        return 0j
    val = _series_all(z0, p.laurent, p.shortest_period)[3]
    if m == 0 and n == 0:
        return complex(val)
    w = m * p.basis[0] + n * p.basis[1]
    eta = m * p.quasi[0] + n * p.quasi[1]
    sign = 1 if (m % 2 == 0 and n % 2 == 0) else -1
    return complex(sign * cmath.exp(eta * (z0 + w / 2)) * val)


def wp_inverse(E: complex, p: EllipticParams, rtol: float = 1e-12) -> complex:
    """Integral of dw / sqrt(4w^3 - g2 w - g3) from E to infinity.

    The ray is mapped to [0, 1) by w = E + h t/(1-t) with h = max(1, |E|); the
    remaining (1-t)^(-1/2) endpoint singularity is handled by QUADPACK's
    algebraic weight. The square root is the product of principal roots of (w - e_i),
    which is continuous along the ray when E lies to the right of every root.
    """
    E = complex(E)
    roots = p.roots
    scale = max(1.0, abs(E))
    for e in roots:
        if abs(E - e) < 1e-8 * scale:
            raise BranchPointError(f"E = {E} coincides with branch point {e}")
    if E.real <= max(r.real for r in roots):
        raise BranchPointError(
            f"E = {E} must lie to the right of every root (max real part "
            f"{max(r.real for r in roots)})"
        )

    shifts = [E - e for e in roots]
    # w = E + h t/(1-t); h ~ |E| keeps the integrand O(1) across [0, 1]
    h = max(1.0, abs(E))

    def g(t, part):
        # (1-t)^(-1/2) is the quadrature weight; (w - e)(1 - t) = (E - e)(1 - t) + h t
        sq = 2.0
        for d in shifts:
            sq *= cmath.sqrt(d * (1.0 - t) + h * t)
        val = h / sq
        return val.real if part == 0 else val.imag

    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for part in (0, 1):
            try:
                val, err = integrate.quad(
                    g, 0.0, 1.0, args=(part,), weight="alg", wvar=(0.0, -0.5),
                    epsabs=1e-15, epsrel=rtol, limit=200,
                )
            except integrate.IntegrationWarning as exc:
                raise QuadratureError(f"quadrature did not converge: {exc}") from exc
            out.append((val, err))
    val = complex(out[0][0], out[1][0])
    err = math.hypot(out[0][1], out[1][1])
    if err > 1e-9 * max(abs(val), 1e-300):
        raise QuadratureError(f"quadrature error estimate {err:.3g} too large")
    return val
