"""Dense complex polynomials, an all-roots solver, and Lame spectral polynomials."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, RootFinderWarning

STRIP_TOL = 1e-14
MAX_SWEEPS = 500
CLUSTER_TOL = 1e-6


@dataclass(frozen=True)
class ComplexPoly:
    """Polynomial with complex coefficients in ascending degree order.

    Exactly-zero trailing coefficients are dropped on construction so that
    ``coeffs[-1]`` is the leading coefficient. Near-zero leading terms are only
    removed on request via :meth:`normalized`; a relative cut applied
    automatically would delete the monic leading 1 of polynomials whose lower
    coefficients are huge (R_{2s+1} reaches 1e30 for s = 6).
    """

    coeffs: np.ndarray = field(compare=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        n = c.size
        while n > 1 and c[n - 1] == 0:
            n -= 1
        c = c[:n]
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def normalized(self, tol: float = STRIP_TOL) -> "ComplexPoly":
        """Drop trailing coefficients below ``tol * max|c|``."""
        c = self.coeffs
        big = np.max(np.abs(c))
        n = c.size
        while n > 1 and abs(c[n - 1]) <= tol * big:
            n -= 1
        return ComplexPoly(c[:n])

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "ComplexPoly":
        c = np.array([leading], dtype=complex)
        for r in roots:
            # multiply by (x - r)
            nxt = np.zeros(c.size + 1, dtype=complex)
            nxt[1:] += c
            nxt[:-1] -= r * c
            c = nxt
        return cls(c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        acc = np.zeros_like(x)
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc if acc.ndim else complex(acc)

    def derivative(self) -> "ComplexPoly":
        if self.degree == 0:
            return ComplexPoly([0.0])
        k = np.arange(1, self.coeffs.size)
        return ComplexPoly(self.coeffs[1:] * k)

    def __mul__(self, other: "ComplexPoly") -> "ComplexPoly":
        return ComplexPoly(np.convolve(self.coeffs, other.coeffs))

    def __eq__(self, other):
        if not isinstance(other, ComplexPoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(
            np.all(self.coeffs == other.coeffs)
        )

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def to_json(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "ComplexPoly":
        return cls([complex(re, im) for re, im in data])


class RootInfo(NamedTuple):
    sweeps: int
    converged: bool
    residuals: np.ndarray


def root_radius(coeffs: np.ndarray) -> float:
    """Fujiwara's bound 2 max_k |c_{n-k}/c_n|^(1/k) on the root moduli."""
    n = coeffs.size - 1
    lead = coeffs[-1]
    ks = np.arange(1, n + 1)
    ratios = np.abs(coeffs[n - ks] / lead) ** (1.0 / ks)
    ratios[-1] = (abs(coeffs[0] / lead) / 2) ** (1.0 / n)
    return 2.0 * float(ratios.max())


def _initial_guesses(coeffs: np.ndarray) -> np.ndarray:
    n = coeffs.size - 1
    radius = 1.0 + root_radius(coeffs)
    k = np.arange(n)
    # off-axis start so conjugate-symmetric problems do not stay trapped
    angles = 2 * np.pi * k / n + 0.4
    return radius * (1.0 + 1e-3 * (k % 3)) * np.exp(1j * angles)


def poly_roots(p: ComplexPoly, return_info: bool = False):
    """All roots of ``p`` by Aberth-Ehrlich simultaneous iteration.

    Every estimate is updated in the same sweep from

        w_i = N_i / (1 - N_i * sum_{j != i} 1/(z_i - z_j)),  N_i = p(z_i)/p'(z_i)

    starting from a perturbed circle enclosing all roots. An estimate is
    frozen once its correction is at rounding level or its residual is below
    the rounding error of evaluating ``p`` there. Failure to settle within 500
    sweeps does not raise: a :class:`RootFinderWarning` carrying the residuals
    is emitted and the current estimates are returned.
    """
    if p.degree < 1:
        raise DomainError("poly_roots needs degree >= 1")
    coeffs = p.coeffs
    n = p.degree
    if n == 1:
        z = np.array([-coeffs[0] / coeffs[1]])
        info = RootInfo(0, True, np.abs(p(z)))
        return (z, info) if return_info else z

    dp = p.derivative()
    abs_poly = ComplexPoly(np.abs(coeffs))
    eps = np.finfo(float).eps
    z = _initial_guesses(coeffs)
    active = np.ones(n, dtype=bool)
    sweeps = 0
    for sweeps in range(1, MAX_SWEEPS + 1):
        zi = z[active]
        pv = p(zi)
        dv = dp(zi)
        with np.errstate(divide="ignore", invalid="ignore"):
            newton = pv / dv
            diff = zi[:, None] - z[None, :]
            inv = 1.0 / diff
            inv[~np.isfinite(inv)] = 0.0
            step = newton / (1.0 - newton * inv.sum(axis=1))
        step[~np.isfinite(step) | (pv == 0)] = 0.0
        z[active] = zi - step
        noise = 8 * eps * abs_poly(np.abs(zi)).real
        done = (np.abs(step) <= 4 * eps * np.abs(zi)) | (np.abs(pv) <= noise)
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            break

    converged = not active.any()
    residuals = np.abs(p(z))
    if not converged:
        warnings.warn(
            f"root finder did not converge in {MAX_SWEEPS} sweeps; "
            f"max residual {residuals.max():.3e}",
            RootFinderWarning,
            stacklevel=2,
        )
    info = RootInfo(sweeps, converged, residuals)
    return (z, info) if return_info else z


def lame_spectral_poly(s: int, g2: complex) -> ComplexPoly:
    """Monic product over j = 0..2s of (E - E_j) with

        E_j = j(j+1) g2 / 4 + 3j(3j-1) / 4.

    No g3 enters the factors.
    """
    if not isinstance(s, (int, np.integer)) or isinstance(s, bool) or s < 1:
        raise DomainError(f"s must be a positive integer, got {s!r}")
    return ComplexPoly.from_roots(band_edge_values(s, g2))


def band_edge_values(s: int, g2: complex) -> list[complex]:
    g2 = complex(g2)
    return [j * (j + 1) * g2 / 4 + 3 * j * (3 * j - 1) / 4 for j in range(2 * s + 1)]


@dataclass(frozen=True)
class BandEdges:
    s: int
    edges: tuple[complex, ...]
    clustered: bool = False
    converged: bool = True

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "edges": [[e.real, e.imag] for e in self.edges],
            "clustered": self.clustered,
            "converged": self.converged,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BandEdges":
        return cls(
            int(data["s"]),
            tuple(complex(re, im) for re, im in data["edges"]),
            bool(data["clustered"]),
            bool(data["converged"]),
        )


def band_edges(s: int, g2: complex) -> BandEdges:
    """Zeros of the Lame spectral polynomial sorted by real part."""
    poly = lame_spectral_poly(s, g2)
    with warnings.catch_warnings():
        warnings.simplefilter("always", RootFinderWarning)
        roots, info = poly_roots(poly, return_info=True)
    roots = sorted((complex(r) for r in roots), key=lambda r: (r.real, r.imag))
    scale = max(1.0, max(abs(r) for r in roots))
    gaps = [abs(a - b) for a, b in zip(roots, roots[1:])]
    clustered = bool(gaps) and min(gaps) < CLUSTER_TOL * scale
    return BandEdges(s, tuple(roots), clustered, info.converged)


def match_roots(a: Sequence[complex], b: Sequence[complex]) -> tuple[float, list[int]]:
    """Optimal one-to-one matching minimising the worst pairwise distance.

    Returns the max distance under the assignment that minimises the total
    distance, and the permutation (index into ``b`` for each entry of ``a``).
    """
    from scipy.optimize import linear_sum_assignment

    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = [0] * len(a)
    for r, c in zip(rows, cols):
        perm[r] = int(c)
    return float(cost[rows, cols].max()) if len(rows) else 0.0, perm


def hausdorff(a: Sequence[complex], b: Sequence[complex]) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.size == 0 or b.size == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
