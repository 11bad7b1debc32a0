"""Lame solutions, a small formal distribution algebra, and the Lame Green kernel.

Distributions here are coefficient records (point masses, their first
derivatives, a Heaviside step at the origin and an optional smooth density)
that only acquire a value when paired with a test function.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .elliptic import EllipticParams, LATTICE_TOL, sigma, wp, zeta
from .errors import (
    DomainError,
    InconsistentTestFunctionError,
    InfiniteValueError,
    LatticeProximityError,
    UndefinedAtJumpError,
)

GAUSS_NODES = 64
CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class LameSolutionParams:
    """The shift ``eps`` (with B = wp(eps)), amplitudes K1, K2 and the lattice."""

    eps: complex
    K1: complex
    K2: complex
    elliptic: EllipticParams
    B: complex = field(init=False, compare=False)
    zeta_eps: complex = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        eps = complex(self.eps)
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "K1", complex(self.K1))
        object.__setattr__(self, "K2", complex(self.K2))
        # wp raises LatticeProximityError when eps sits on the lattice
        object.__setattr__(self, "B", wp(eps, self.elliptic))
        object.__setattr__(self, "zeta_eps", zeta(eps, self.elliptic))


def lame_solution(z: complex, p: LameSolutionParams) -> complex:
    """K1 s(z+e)/s(z) exp(-z Z(e)) + K2 s(z-e)/s(z) exp(z Z(e)) with s = sigma, Z = zeta."""
    z = complex(z)
    z0, _, _ = p.elliptic.reduce(z)
    if abs(z0) < LATTICE_TOL:
        raise LatticeProximityError(f"z = {z} lies on the lattice, where f has a pole")
    ell = p.elliptic
    sz = sigma(z, ell)
    out = 0j
    if p.K1 != 0:
        out += p.K1 * sigma(z + p.eps, ell) / sz * cmath.exp(-z * p.zeta_eps)
    if p.K2 != 0:
        out += p.K2 * sigma(z - p.eps, ell) / sz * cmath.exp(z * p.zeta_eps)
    return out


def richardson_second_derivative(
    f: Callable[[complex], complex], z: complex, h: float = 0.05, levels: int = 3
) -> complex:
    """f''(z) from central differences at h, h/2, ... combined by Richardson's tableau."""
    row = []
    for k in range(levels):
        hk = h / 2 ** k
        row.append((f(z + hk) - 2 * f(z) + f(z - hk)) / hk ** 2)
    for m in range(1, levels):
        factor = 4 ** m
        row = [(factor * row[i + 1] - row[i]) / (factor - 1) for i in range(len(row) - 1)]
    return row[0]


def lame_residual(z: complex, p: LameSolutionParams, sign: int = -1, h: float = 0.05) -> complex:
    """-f'' + 2 wp(z) f + sign * wp(eps) f.

    ``sign=-1`` gives -f'' + 2 wp f - B f, the residual of -y'' + 2 wp y = B y
    with B = wp(eps). ``sign=+1`` tests B = -wp(eps) instead.
    """
    f = lambda x: lame_solution(x, p)
    fz = f(z)
    d2 = richardson_second_derivative(f, z, h)
    return -d2 + 2 * wp(z, p.elliptic) * fz + sign * p.B * fz


@dataclass(frozen=True)
class DistributionExpr:
    """sum c delta_w + sum c' delta'_w + h H(x) + smooth(x), or an infinite value.

    ``H`` is the Heaviside step at the origin. Pairing rules:
    <delta_w, phi> = phi(w), <delta'_w, phi> = -phi'(w), and the step and
    smooth parts are integrated against phi on a caller-supplied interval.
    """

    delta_terms: tuple[tuple[complex, complex], ...] = ()
    delta_prime_terms: tuple[tuple[complex, complex], ...] = ()
    heaviside_coeff: complex = 0j
    smooth: Optional[Callable] = field(default=None, compare=False)
    infinite: bool = False

    def __post_init__(self):
        object.__setattr__(
            self, "delta_terms", tuple((complex(w), complex(c)) for w, c in self.delta_terms)
        )
        object.__setattr__(
            self,
            "delta_prime_terms",
            tuple((complex(w), complex(c)) for w, c in self.delta_prime_terms),
        )
        object.__setattr__(self, "heaviside_coeff", complex(self.heaviside_coeff))

    @classmethod
    def delta(cls, w: complex, c: complex = 1.0) -> "DistributionExpr":
        return cls(delta_terms=((w, c),))

    @classmethod
    def delta_prime(cls, w: complex, c: complex = 1.0) -> "DistributionExpr":
        return cls(delta_prime_terms=((w, c),))

    @classmethod
    def heaviside(cls, c: complex = 1.0) -> "DistributionExpr":
        return cls(heaviside_coeff=c)

    @classmethod
    def zero(cls) -> "DistributionExpr":
        return cls()

    @classmethod
    def infinity(cls) -> "DistributionExpr":
        return cls(infinite=True)

    def is_zero(self) -> bool:
        return (
            not self.infinite
            and self.smooth is None
            and self.heaviside_coeff == 0
            and all(c == 0 for _, c in self.delta_terms + self.delta_prime_terms)
        )

    def __add__(self, other: "DistributionExpr") -> "DistributionExpr":
        if not isinstance(other, DistributionExpr):
            return NotImplemented
        if self.smooth is None or other.smooth is None:
            smooth = self.smooth or other.smooth
        else:
            a, b = self.smooth, other.smooth
            smooth = lambda x: a(x) + b(x)
        return DistributionExpr(
            self.delta_terms + other.delta_terms,
            self.delta_prime_terms + other.delta_prime_terms,
            self.heaviside_coeff + other.heaviside_coeff,
            smooth,
            self.infinite or other.infinite,
        )

    def __mul__(self, a) -> "DistributionExpr":
        a = complex(a)
        smooth = None
        if self.smooth is not None:
            s = self.smooth
            smooth = lambda x: a * s(x)
        return DistributionExpr(
            tuple((w, a * c) for w, c in self.delta_terms),
            tuple((w, a * c) for w, c in self.delta_prime_terms),
            a * self.heaviside_coeff,
            smooth,
            self.infinite and a != 0,
        )

    __rmul__ = __mul__

    def __neg__(self) -> "DistributionExpr":
        return self * -1

    def __sub__(self, other: "DistributionExpr") -> "DistributionExpr":
        return self + (-other)

    def simplified(self) -> "DistributionExpr":
        """Merge terms sharing a location and drop zero coefficients."""

        def merge(terms):
            acc: dict[complex, complex] = {}
            for w, c in terms:
                acc[w] = acc.get(w, 0j) + c
            return tuple((w, c) for w, c in acc.items() if c != 0)

        return DistributionExpr(
            merge(self.delta_terms),
            merge(self.delta_prime_terms),
            self.heaviside_coeff,
            self.smooth,
            self.infinite,
        )

    def to_json(self) -> dict:
        if self.smooth is not None:
            raise DomainError("a smooth density cannot be serialised")
        return {
            "delta": [[w.real, w.imag, c.real, c.imag] for w, c in self.delta_terms],
            "delta_prime": [[w.real, w.imag, c.real, c.imag] for w, c in self.delta_prime_terms],
            "heaviside": [self.heaviside_coeff.real, self.heaviside_coeff.imag],
            "infinite": self.infinite,
        }

    @classmethod
    def from_json(cls, data: dict) -> "DistributionExpr":
        return cls(
            tuple((complex(a, b), complex(c, d)) for a, b, c, d in data.get("delta", [])),
            tuple((complex(a, b), complex(c, d)) for a, b, c, d in data.get("delta_prime", [])),
            complex(*data.get("heaviside", [0.0, 0.0])),
            None,
            bool(data.get("infinite", False)),
        )


def _check_consistent(phi, dphi, points, h: float = 1e-4) -> None:
    for x in points:
        fd = (phi(x + h) - phi(x - h)) / (2 * h)
        d = dphi(x)
        if abs(fd - d) > CONSISTENCY_TOL * max(1.0, abs(d)):
            raise InconsistentTestFunctionError(
                f"phi' disagrees with the finite difference of phi at x = {x}: {d} vs {fd}"
            )


def pair(
    D: DistributionExpr,
    phi: Callable,
    dphi: Callable,
    interval: Optional[tuple[float, float]] = None,
    check: bool = True,
) -> complex:
    """<D, phi>.

    Step and smooth parts are integrated with 64-node Gauss-Legendre on
    ``interval`` (the step contributes over its intersection with x >= 0);
    an interval is required only when those parts are present.
    """
    if D.infinite:
        raise InfiniteValueError("cannot pair an infinite distribution")
    if check:
        locs = [w for w, _ in D.delta_terms + D.delta_prime_terms][:3]
        spots = locs + [0.0, 0.5, -0.5][: 3 - len(locs)]
        _check_consistent(phi, dphi, spots)
    total = 0j
    for w, c in D.delta_terms:
        total += c * phi(w)
    for w, c in D.delta_prime_terms:
        total -= c * dphi(w)
    if D.heaviside_coeff != 0 or D.smooth is not None:
        if interval is None:
            raise DomainError("pairing a step or smooth part needs an integration interval")
        a, b = map(float, interval)
        t, wts = np.polynomial.legendre.leggauss(GAUSS_NODES)
        if D.smooth is not None:
            x = (a + b) / 2 + (b - a) / 2 * t
            vals = np.array([D.smooth(xi) * phi(xi) for xi in x])
            total += (b - a) / 2 * np.dot(wts, vals)
        lo = max(a, 0.0)
        if D.heaviside_coeff != 0 and b > lo:
            x = (lo + b) / 2 + (b - lo) / 2 * t
            vals = np.array([phi(xi) for xi in x])
            total += D.heaviside_coeff * (b - lo) / 2 * np.dot(wts, vals)
    return complex(total)


@dataclass(frozen=True)
class ComposeCoefficients:
    """delta'(g) = delta_prime * delta'_w + delta * delta_w, and delta(g) = delta_scale * delta_w."""

    delta_prime: complex
    delta: complex
    delta_scale: float


def delta_compose(g_prime_at_w: complex, g_doubleprime_at_w: complex) -> ComposeCoefficients:
    """Coefficients of delta'(g(z)) = |g'|^-2 (delta'(z-w) + (g''/g') delta(z-w)).

    Also returns the point-mass scale 1/|g'|, so that g(z) = 2z gives the
    familiar delta(2w) = delta(w)/2 and delta'(2w) = delta'(z-w)/4.
    """
    gp = complex(g_prime_at_w)
    gpp = complex(g_doubleprime_at_w)
    if gp == 0:
        raise DomainError("g'(w) vanishes; the composition is not defined")
    m2 = abs(gp) ** 2
    return ComposeCoefficients(1 / m2, gpp / (gp * m2), 1 / abs(gp))


def upper_half_plane(w: complex) -> bool:
    """Im w >= 0; the real axis is grouped with the upper half-plane."""
    return complex(w).imag >= 0


def green_kernel(w: complex, p: LameSolutionParams, kappa: complex) -> DistributionExpr:
    """Green kernel of -d^2/dz^2 + 2 wp(z) as a distribution in z.

    Upper half-plane: (kappa delta_w + f(w) delta'_w) / wp(eps).
    Lower half-plane: the same with w replaced by -w.
    The product rule f(z) delta'(z-w) = f(w) delta'(z-w) - f'(w) delta(z-w)
    has already cancelled the f'(w) terms.
    """
    if p.B == 0:
        raise DomainError("wp(eps) = 0: the kernel divides by the eigenvalue B")
    w = complex(w)
    loc = w if upper_half_plane(w) else -w
    kappa = complex(kappa)
    fw = lame_solution(loc, p) if (p.K1 != 0 or p.K2 != 0) else 0j
    return DistributionExpr(((loc, kappa / p.B),), ((loc, fw / p.B),))


def heaviside(lam: float, reflect: bool = False) -> float:
    """H(lam), or H(-lam) with ``reflect``; undefined at the jump."""
    lam = float(lam)
    if lam == 0.0:
        raise UndefinedAtJumpError("the step is undefined at lambda = 0")
    if reflect:
        lam = -lam
    return 1.0 if lam > 0 else 0.0


@dataclass(frozen=True)
class LameSSFValue:
    value: DistributionExpr
    halfplane: str

    @property
    def infinite(self) -> bool:
        return self.value.infinite

    def to_json(self) -> dict:
        return {"halfplane": self.halfplane, "value": self.value.to_json()}


def lame_ssf(lam: float, w: complex, p: LameSolutionParams, kappa: complex) -> LameSSFValue:
    """Spectral shift value: infinite for w in the upper half-plane,
    (2 kappa delta_w + f(w) delta'_w) H(lam) / 4 in the lower one.
    """
    h = heaviside(lam)
    w = complex(w)
    if upper_half_plane(w):
        return LameSSFValue(DistributionExpr.infinity(), "upper")
    if h == 0.0:
        return LameSSFValue(DistributionExpr.zero(), "lower")
    kappa = complex(kappa)
    fw = lame_solution(w, p) if (p.K1 != 0 or p.K2 != 0) else 0j
    D = DistributionExpr(((w, 2 * kappa * h / 4),), ((w, fw * h / 4),))
    return LameSSFValue(D, "lower")


def gaussian(center: complex, width: float = 1.0) -> tuple[Callable, Callable]:
    """Unit-height Gaussian test function and its derivative."""

    def phi(x):
        return np.exp(-((x - center) / width) ** 2)

    def dphi(x):
        return -2 * (x - center) / width ** 2 * np.exp(-((x - center) / width) ** 2)

    return phi, dphi
