"""Fourier symbol of the Brioschi-Halphen operator and its Green function.

The weighted Fourier transform turns the operator into the quadratic symbol
X2 z^2 + i X1 z + X0. Its roots a+ and a- feed a two-exponential Green
function whose branch is picked by the step selector Gamma_p.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

import numpy as np

from .elliptic import EllipticParams
from .errors import DegenerateSymbolError, DomainError
from .lame_green import heaviside

DEFAULT_SIGMA = (2, 2, 2)


def _cjson(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class BHParams:
    s: int
    sigma: tuple[int, int, int]
    elliptic: EllipticParams
    A: complex = 0j

    def __post_init__(self):
        if not isinstance(self.s, (int, np.integer)) or isinstance(self.s, bool) or self.s < 1:
            raise DomainError(f"s must be a positive integer, got {self.s!r}")
        sig = tuple(self.sigma)
        if len(sig) != 3 or any(
            not isinstance(x, (int, np.integer)) or isinstance(x, bool) or x < 1 for x in sig
        ):
            raise DomainError(f"sigma must be three integers >= 1, got {self.sigma!r}")
        object.__setattr__(self, "s", int(self.s))
        object.__setattr__(self, "sigma", tuple(int(x) for x in sig))
        object.__setattr__(self, "A", complex(self.A))

    @classmethod
    def from_invariants(cls, s, g2, g3, sigma=DEFAULT_SIGMA, A=0j) -> "BHParams":
        return cls(s, tuple(sigma), EllipticParams.from_invariants(g2, g3), A)

    @property
    def roots(self) -> tuple[complex, complex, complex]:
        return self.elliptic.roots

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "sigma": list(self.sigma),
            "g2": _cjson(self.elliptic.g2),
            "g3": _cjson(self.elliptic.g3),
            "A": _cjson(self.A),
        }

    @classmethod
    def from_json(cls, data: dict) -> "BHParams":
        return cls.from_invariants(
            int(data["s"]),
            complex(*data["g2"]),
            complex(*data["g3"]),
            tuple(int(x) for x in data.get("sigma", DEFAULT_SIGMA)),
            complex(*data.get("A", [0.0, 0.0])),
        )


def weight_coeffs(sigma: Sequence[int], roots: Sequence[complex]) -> dict[tuple[int, int, int], complex]:
    """h_mnq = C(s1-1,m) C(s2-1,n) C(s3-1,q) e1^m e2^n e3^q for 0 <= m < s1, etc."""
    s1, s2, s3 = (int(x) for x in sigma)
    e1, e2, e3 = (complex(e) for e in roots)
    out = {}
    for m, n, q in itertools.product(range(s1), range(s2), range(s3)):
        out[(m, n, q)] = (
            comb(s1 - 1, m) * comb(s2 - 1, n) * comb(s3 - 1, q) * e1 ** m * e2 ** n * e3 ** q
        )
    return out


def table_weight_coeffs(sigma: Sequence[int], roots: Sequence[complex]) -> dict[tuple[int, int, int], complex]:
    """The ten weight entries in the closed forms the tabulated rows use."""
    s1, s2, s3 = (int(x) for x in sigma)
    e1, e2, e3 = (complex(e) for e in roots)
    return {
        (0, 0, 0): 1.0 + 0j,
        (1, 0, 0): (s1 - 1) * e1,
        (0, 1, 0): (s2 - 1) * e2,
        (0, 0, 1): (s3 - 1) * e3,
        (1, 1, 0): (s1 - 1) * (s2 - 1) * e1 * e2,
        (1, 0, 1): (s1 - 1) * (s3 - 1) * e1 * e3,
        (0, 1, 1): (s2 - 1) * (s3 - 1) * e2 * e3,
        (2, 0, 0): (s1 - 1) * (s1 - 2) / 2 * e1 ** 2,
        (0, 2, 0): (s2 - 1) * (s2 - 2) / 2 * e2 ** 2,
        (0, 0, 2): (s3 - 1) * (s3 - 2) / 2 * e3 ** 2,
    }


def _second_order_sum(sigma, roots) -> complex:
    s1, s2, s3 = sigma
    e1, e2, e3 = roots
    return (
        (s1 - 1) * (s2 - 1) * e1 * e2
        + (s2 - 1) * (s3 - 1) * e2 * e3
        + (s1 - 1) * (s3 - 1) * e1 * e3
        + (s1 - 1) * (s1 - 2) / 2 * e1 ** 2
        + (s2 - 1) * (s2 - 2) / 2 * e2 ** 2
        + (s3 - 1) * (s3 - 2) / 2 * e3 ** 2
    )


class SymbolQuadratic(NamedTuple):
    X2: complex
    X1: complex
    X0: complex
    a_plus: complex
    a_minus: complex
    discriminant: complex

    def __call__(self, z):
        return self.X2 * z * z + 1j * self.X1 * z + self.X0

    def factorization_error(self) -> float:
        """Coefficientwise gap between X2 (z-a+)(z-a-) and X2 z^2 + i X1 z + X0."""
        lin = -self.X2 * (self.a_plus + self.a_minus)
        const = self.X2 * self.a_plus * self.a_minus
        scale = max(abs(self.X2), abs(self.X1), abs(self.X0), 1e-300)
        return max(abs(lin - 1j * self.X1), abs(const - self.X0)) / scale


def symbol_coefficients(p: BHParams) -> SymbolQuadratic:
    """X2 = g3, X1 = (3-2s) g3/2 - 2 S g3, X0 = S (5-2s) g2/2 - 2 Q g3.

    S = sigma1 e1 + sigma2 e2 + sigma3 e3 and Q is the second-order weight
    sum. The roots are a+- = i(-X1 +- sqrt(X1^2 + 4 X2 X0)) / (2 X2) with
    the principal square root.
    """
    g2, g3 = p.elliptic.g2, p.elliptic.g3
    e = p.roots
    S = sum(si * ei for si, ei in zip(p.sigma, e))
    Q = _second_order_sum(p.sigma, e)
    X2 = g3
    X1 = (3 - 2 * p.s) * g3 / 2 - 2 * S * g3
    X0 = S * (5 - 2 * p.s) * g2 / 2 - 2 * Q * g3
    if X2 == 0:
        raise DegenerateSymbolError("X2 = g3 = 0: the symbol is not quadratic")
    disc = X1 * X1 + 4 * X2 * X0
    root = cmath.sqrt(disc)
    a_plus = 1j * (-X1 + root) / (2 * X2)
    a_minus = 1j * (-X1 - root) / (2 * X2)
    # the root whose numerator cancels is rebuilt from a+ a- = X0 / X2
    if abs(-X1 + root) < abs(-X1 - root):
        a_plus = X0 / (X2 * a_minus) if a_minus != 0 else a_plus
    else:
        a_minus = X0 / (X2 * a_plus) if a_plus != 0 else a_minus
    return SymbolQuadratic(X2, X1, X0, a_plus, a_minus, disc)


def partial_fractions(a_plus: complex, a_minus: complex, n: int = 20, seed: int = 0) -> float:
    """Max deviation of 1/((z-a+)(z-a-)) from (1/(z-a+) - 1/(z-a-))/(a+ - a-).

    Evaluated at ``n`` random points kept at least one root-gap away from
    both poles; the deviation is relative to the left side.
    """
    a_plus, a_minus = complex(a_plus), complex(a_minus)
    gap = abs(a_plus - a_minus)
    if gap == 0:
        raise DomainError("coincident roots: no partial-fraction split")
    rng = np.random.default_rng(seed)
    centre = (a_plus + a_minus) / 2
    scale = max(gap, 1.0)
    worst = 0.0
    count = 0
    while count < n:
        z = centre + scale * complex(*rng.uniform(-3, 3, 2))
        if min(abs(z - a_plus), abs(z - a_minus)) < 0.5 * gap:
            continue
        lhs = 1 / ((z - a_plus) * (z - a_minus))
        rhs = (1 / (z - a_plus) - 1 / (z - a_minus)) / (a_plus - a_minus)
        worst = max(worst, abs(lhs - rhs) / abs(lhs))
        count += 1
    return worst


def sgn(t: float) -> float:
    return float(np.sign(t))


def step(t: float) -> float:
    """u(t) = 1/2 + sgn(t)/2 (so u(0) = 1/2)."""
    return 0.5 + 0.5 * sgn(t)


def gamma_selector(p: float, t: float) -> float:
    """u(t) for p > 0, -sgn(t)/2 for p = 0, -u(-t) for p < 0."""
    if p > 0:
        return step(t)
    if p == 0:
        return -0.5 * sgn(t)
    return -step(-t)


@dataclass(frozen=True)
class GreenBHValue:
    G_plus: complex
    G_minus: complex
    p: float
    t_plus: float
    t_minus: float
    imaginary_axis: bool

    def __iter__(self):
        return iter((self.G_plus, self.G_minus))


def green_bh(w: complex, p: BHParams, selector_root: str = "plus") -> GreenBHValue:
    """G+-(w) = i/(a+ - a-) (e^{+-i a+ w} - e^{+-i a- w}) Gamma_p(+-w)
               + A (e^{+-i a+ w} + e^{+-i a- w}) / (2 pi sqrt(X1^2 + 4 X2 X0)).

    Gamma_p takes the real part of +-w; on the imaginary axis the p = 0
    branch is used (it gives 0 there). ``selector_root`` picks whether p is
    Im(a+) or Im(a-). Unpacks as (G_plus, G_minus).
    """
    w = complex(w)
    if not cmath.isfinite(w):
        raise DomainError("w must be finite")
    q = symbol_coefficients(p)
    if q.discriminant == 0:
        raise DegenerateSymbolError("zero discriminant: a+ = a-")
    if selector_root not in ("plus", "minus"):
        raise DomainError("selector_root must be 'plus' or 'minus'")
    pp = (q.a_plus if selector_root == "plus" else q.a_minus).imag
    root = cmath.sqrt(q.discriminant)
    on_axis = w.real == 0.0
    out = []
    ts = []
    for sign in (1, -1):
        t = (sign * w).real
        ts.append(t)
        gam = gamma_selector(0.0, t) if on_axis else gamma_selector(pp, t)
        ep = cmath.exp(sign * 1j * q.a_plus * w)
        em = cmath.exp(sign * 1j * q.a_minus * w)
        part = 1j / (q.a_plus - q.a_minus) * (ep - em) * gam
        comp = p.A * (ep + em) / (2 * math.pi * root)
        out.append(part + comp)
    return GreenBHValue(out[0], out[1], pp, ts[0], ts[1], on_axis)


def ssf_bh(lam: float, w: complex, p: BHParams, reflect: bool = False) -> tuple[complex, complex]:
    """(xi+, xi-) = G+-(w) H(lam); ``reflect`` uses H(-lam) instead."""
    h = heaviside(lam, reflect)
    if h == 0.0:
        return (0j, 0j)
    g = green_bh(w, p)
    return (g.G_plus * h, g.G_minus * h)


def bh_table_check(p: BHParams) -> dict:
    """Compare the tabulated weights and row symbols with the consolidated X's.

    Builds the symbol three ways: from the table rows as printed (the 000 row
    carries g2 in its linear term), from the consolidated X formulas, and
    from the consolidated formulas with the constant 4s(2s-1) of the 000 row
    kept in X0. Reports all of them and their pairwise differences.
    """
    g2, g3 = p.elliptic.g2, p.elliptic.g3
    e = p.roots
    s = p.s
    binom = weight_coeffs(p.sigma, e)
    table = table_weight_coeffs(p.sigma, e)
    weights = []
    for key, hv in table.items():
        bv = binom.get(key, 0j)
        weights.append(
            {
                "mnq": "".join(map(str, key)),
                "binomial": bv,
                "table": hv,
                "diff": abs(bv - hv),
                "in_expansion": key in binom,
            }
        )
    h1 = table[(1, 0, 0)] + table[(0, 1, 0)] + table[(0, 0, 1)]
    h2 = sum(table[k] for k in [(1, 1, 0), (1, 0, 1), (0, 1, 1), (2, 0, 0), (0, 2, 0), (0, 0, 2)])
    # row symbols: psi000 = g3 z^2 + i(3-2s) g2/2 z + 4s(2s-1),
    # psi100 = (5-2s) g2/2 - 2 i g3 z, psi200 = -2 g3
    table_X = {
        "X2": g3,
        "X1": (3 - 2 * s) * g2 / 2 - 2 * h1 * g3,
        "X0": 4 * s * (2 * s - 1) + h1 * (5 - 2 * s) * g2 / 2 - 2 * h2 * g3,
    }
    S = sum(si * ei for si, ei in zip(p.sigma, e))
    Q = _second_order_sum(p.sigma, e)
    consolidated = {
        "X2": g3,
        "X1": (3 - 2 * s) * g3 / 2 - 2 * S * g3,
        "X0": S * (5 - 2 * s) * g2 / 2 - 2 * Q * g3,
    }
    with_constant = dict(consolidated, X0=consolidated["X0"] + 4 * s * (2 * s - 1))
    g2_linear = dict(consolidated, X1=(3 - 2 * s) * g2 / 2 - 2 * S * g3)

    def diff(a, b):
        return {k: abs(a[k] - b[k]) for k in a}

    return {
        "params": p.to_json(),
        "roots": list(e),
        "weights": weights,
        "weights_agree": all(w["diff"] <= 1e-12 * max(1.0, abs(w["table"])) for w in weights),
        "variants": {
            "table_rows": table_X,
            "consolidated": consolidated,
            "consolidated_with_constant": with_constant,
            "consolidated_g2_linear": g2_linear,
        },
        "differences": {
            "table_rows_vs_consolidated": diff(table_X, consolidated),
            "with_constant_vs_consolidated": diff(with_constant, consolidated),
            "g2_linear_vs_consolidated": diff(g2_linear, consolidated),
            "table_rows_vs_with_constant": diff(table_X, with_constant),
        },
        "sum_sigma_e": S,
        "sum_sigma_minus_one_e": h1,
    }
