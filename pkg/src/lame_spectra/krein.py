"""Spectral shift function of finite Hermitian pairs and related utilities.

For matrices the spectral shift function is the difference of eigenvalue
counting functions,

    xi(lam) = #{eig(H0) <= lam} - #{eig(H) <= lam},

and it is also the boundary value (1/pi) arg Delta(lam + i0) of the
perturbation determinant Delta(z) = det((H - z)(H0 - z)^-1). Both routes are
implemented so each can serve as an oracle for the other.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import ContourError, DomainError, GridCoverageError, PhaseUnwindingError
from .linalg import as_square, check_hermitian, jacobi_eigh, matrix_from_json, matrix_to_json

RANK_RTOL = 1e-10
SKIP_TOL = 1e-6
DEFAULT_LADDER = (1e-2, 1e-3, 1e-4)
DT_NODES = 256


@dataclass(frozen=True, eq=False)
class OperatorPair:
    """Unperturbed ``H0`` and perturbed ``H``, both Hermitian."""

    H0: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        H0 = as_square(self.H0, "H0")
        H = as_square(self.H, "H")
        if H0.shape != H.shape:
            raise DomainError(f"H0 {H0.shape} and H {H.shape} differ in shape")
        check_hermitian(H0, "H0")
        check_hermitian(H, "H")
        object.__setattr__(self, "H0", H0)
        object.__setattr__(self, "H", H)

    @classmethod
    def from_perturbation(cls, H0, V) -> "OperatorPair":
        H0 = as_square(H0, "H0")
        return cls(H0, H0 + as_square(V, "V"))

    @property
    def n(self) -> int:
        return self.H0.shape[0]

    @cached_property
    def V(self) -> np.ndarray:
        return self.H - self.H0

    @cached_property
    def eig_H0(self) -> np.ndarray:
        return jacobi_eigh(self.H0)[0]

    @cached_property
    def eig_H(self) -> np.ndarray:
        return jacobi_eigh(self.H)[0]

    @cached_property
    def eig_V(self) -> np.ndarray:
        return jacobi_eigh((self.V + self.V.conj().T) / 2)[0]

    @property
    def rank_V(self) -> int:
        ev = np.abs(self.eig_V)
        norm = ev.max() if ev.size else 0.0
        if norm == 0.0:
            return 0
        return int(np.sum(ev > RANK_RTOL * norm))

    @property
    def trace_V(self) -> float:
        return float(np.trace(self.V).real)

    @property
    def trace_norm_V(self) -> float:
        # singular values of a Hermitian matrix are |eigenvalues|
        return float(np.sum(np.abs(self.eig_V)))

    def to_json(self) -> dict:
        return {"H0": matrix_to_json(self.H0), "H": matrix_to_json(self.H)}

    @classmethod
    def from_json(cls, data: dict) -> "OperatorPair":
        if "V" in data and "H" not in data:
            return cls.from_perturbation(matrix_from_json(data["H0"]), matrix_from_json(data["V"]))
        return cls(matrix_from_json(data["H0"]), matrix_from_json(data["H"]))


def random_hermitian(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (X + X.conj().T) / 2


def random_pair(
    n: int, rank: int, rng: np.random.Generator, positive: bool = False
) -> OperatorPair:
    """Random H0 plus a rank-``rank`` Hermitian perturbation sum_k g_k phi_k phi_k^H."""
    H0 = random_hermitian(n, rng)
    V = np.zeros((n, n), dtype=complex)
    for _ in range(rank):
        phi = rng.normal(size=n) + 1j * rng.normal(size=n)
        phi /= np.linalg.norm(phi)
        g = rng.uniform(0.2, 2.0)
        if not positive and rng.random() < 0.5:
            g = -g
        V += g * np.outer(phi, phi.conj())
    V = (V + V.conj().T) / 2
    return OperatorPair.from_perturbation(H0, V)


@dataclass(frozen=True)
class SSFSample:
    grid: np.ndarray
    xi: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in ("counting", "arg_limit"):
            raise DomainError(f"unknown SSF method {self.method!r}")
        grid = np.asarray(self.grid, dtype=float)
        xi = np.asarray(self.xi, dtype=float)
        if grid.shape != xi.shape:
            raise DomainError("grid and xi lengths differ")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "xi", xi)

    def trapezoid(self) -> float:
        return float(np.trapezoid(self.xi, self.grid))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["lambda", "xi", "method"])
        for lam, x in zip(self.grid, self.xi):
            w.writerow([repr(float(lam)), repr(float(x)), self.method])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "SSFSample":
        # parameter lines written by the CLI start with '#'
        body = "\n".join(l for l in text.splitlines() if not l.startswith("#"))
        rows = list(csv.DictReader(io.StringIO(body)))
        methods = {r["method"] for r in rows}
        if len(methods) > 1:
            raise DomainError("mixed methods in SSF CSV")
        return cls(
            np.array([float(r["lambda"]) for r in rows]),
            np.array([float(r["xi"]) for r in rows]),
            methods.pop() if methods else "counting",
        )


@dataclass(frozen=True)
class SSFSteps:
    """Counting SSF as a step function: value ``values[k]`` on [breaks[k], breaks[k+1])."""

    breaks: np.ndarray
    values: np.ndarray = field(repr=False)

    def integral(self) -> float:
        if self.breaks.size < 2:
            return 0.0
        widths = np.diff(self.breaks)
        return float(np.sum(self.values * widths))

    def abs_integral(self) -> float:
        if self.breaks.size < 2:
            return 0.0
        return float(np.sum(np.abs(self.values) * np.diff(self.breaks)))


def _count_le(eigs: np.ndarray, lam: np.ndarray) -> np.ndarray:
    return np.searchsorted(np.sort(eigs), lam, side="right")


def ssf_steps(pair: OperatorPair) -> SSFSteps:
    breaks = np.unique(np.concatenate([pair.eig_H0, pair.eig_H]))
    if breaks.size < 2:
        return SSFSteps(breaks, np.zeros(0))
    left = breaks[:-1]
    values = _count_le(pair.eig_H0, left) - _count_le(pair.eig_H, left)
    return SSFSteps(breaks, values.astype(float))


def counting_ssf(pair: OperatorPair, grid: Sequence[float]) -> SSFSample:
    """Counting-function SSF sampled on ``grid``.

    The grid must be ascending and extend strictly beyond every eigenvalue of
    both matrices, otherwise part of the support of xi would be missed.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise GridCoverageError("grid must be a nonempty 1-d sequence")
    if np.any(np.diff(grid) <= 0):
        raise GridCoverageError("grid must be strictly ascending")
    eigs = np.concatenate([pair.eig_H0, pair.eig_H])
    if eigs.size and (grid[0] >= eigs.min() or grid[-1] <= eigs.max()):
        raise GridCoverageError(
            f"grid [{grid[0]:g}, {grid[-1]:g}] does not cover spectra "
            f"[{eigs.min():g}, {eigs.max():g}]"
        )
    xi = _count_le(pair.eig_H0, grid) - _count_le(pair.eig_H, grid)
    return SSFSample(grid, xi.astype(float), "counting")


def _delta(eig_H: np.ndarray, eig_H0: np.ndarray, z: np.ndarray) -> np.ndarray:
    # pair the factors in sorted order so that the running product stays O(1)
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for a, b in zip(np.sort(eig_H), np.sort(eig_H0)):
        out = out * ((a - z) / (b - z))
    return out


def perturbation_determinant(pair: OperatorPair, z) -> complex:
    """Delta(z) = prod(lam_i(H) - z) / prod(lam_i(H0) - z) for nonreal ``z``."""
    z = complex(z)
    if z.imag == 0.0:
        raise DomainError("perturbation determinant is only defined off the real axis")
    return complex(_delta(pair.eig_H, pair.eig_H0, np.array([z]))[0])


def _lagrange_at_zero(eps: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Polynomial extrapolation of values(eps) to eps = 0 (rows = eps)."""
    out = np.zeros(values.shape[1:])
    for i, ei in enumerate(eps):
        w = 1.0
        for k, ek in enumerate(eps):
            if k != i:
                w *= ek / (ek - ei)
        out = out + w * values[i]
    return out


def arg_delta_upper(pair: OperatorPair, lam: np.ndarray, eps: Sequence[float]) -> np.ndarray:
    """Continuous arg Delta(lam + i*eps) normalised by arg Delta(i*inf) = 0.

    The branch is followed down the vertical line from lam + iT to lam + i*eps
    on a geometric ladder of heights. Along that line each of the 2n factors
    turns by at most 1/2 radian per unit of log(y), so steps of pi/(4n) in
    log(y) keep each increment of arg Delta below pi/4; an increment above
    pi/2 means the tracking failed and raises PhaseUnwindingError.
    Returns an array of shape (len(eps), len(lam)).
    """
    lam = np.asarray(lam, dtype=float)
    eps = np.asarray(eps, dtype=float)
    n = max(pair.n, 1)
    spread = max(1.0, float(np.max(np.abs(np.concatenate([pair.eig_H0, pair.eig_H, [0.0]])))))
    T = 1e3 * (spread + float(np.max(np.abs(lam), initial=0.0)))
    top = _delta(pair.eig_H, pair.eig_H0, lam + 1j * T)
    while np.max(np.abs(top - 1.0)) > 0.5:
        T *= 10
        top = _delta(pair.eig_H, pair.eig_H0, lam + 1j * T)
    dlog = math.pi / (4 * n)
    heights = [T]
    for e in sorted(eps, reverse=True):
        nsteps = max(1, math.ceil(math.log(heights[-1] / e) / dlog))
        heights.extend(np.geomspace(heights[-1], e, nsteps + 1)[1:])
    heights = np.array(heights)
    Z = lam[None, :] + 1j * heights[:, None]
    D = _delta(pair.eig_H, pair.eig_H0, Z)
    steps = np.angle(D[1:] / D[:-1])
    if np.any(np.abs(steps) > math.pi / 2):
        raise PhaseUnwindingError("arg Delta jumped by more than pi/2 along the vertical path")
    phase = np.angle(D[0]) + np.concatenate([np.zeros((1, lam.size)), np.cumsum(steps, axis=0)])
    rows = [int(np.argmin(np.abs(heights - e))) for e in eps]
    return phase[rows]


def _auto_ladder(dmin: float) -> tuple[float, ...]:
    scale = min(1.0, 1e-2 * dmin / DEFAULT_LADDER[-1])
    return tuple(e * scale for e in DEFAULT_LADDER)


def ssf_via_arg(
    pair: OperatorPair,
    grid: Sequence[float],
    eps_ladder: Sequence[float] | None = None,
    skip_tol: float = SKIP_TOL,
) -> SSFSample:
    """xi(lam) = (1/pi) lim_{eps->0} arg Delta(lam + i eps).

    ``arg Delta`` is evaluated on each rung of ``eps_ladder`` (see
    :func:`arg_delta_upper` for the branch) and extrapolated to eps = 0 by
    Lagrange interpolation in eps. Grid points within ``skip_tol`` of an
    eigenvalue are skipped and filled from the nearest evaluated neighbour.
    The default ``eps_ladder=None`` uses ``DEFAULT_LADDER``, scaled down when
    needed so that its smallest rung is at most 1% of the closest remaining
    grid-to-eigenvalue distance (a rung far above that distance cannot
    resolve the jump).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise GridCoverageError("grid must be a nonempty 1-d sequence")
    eigs = np.concatenate([pair.eig_H0, pair.eig_H])
    if eigs.size:
        dist = np.min(np.abs(grid[:, None] - eigs[None, :]), axis=1)
    else:
        dist = np.full(grid.size, np.inf)
    keep = dist > skip_tol
    if not keep.any():
        raise GridCoverageError("every grid point lies on an eigenvalue")
    if eps_ladder is None:
        eps_ladder = _auto_ladder(float(dist[keep].min()))
    eps = np.sort(np.asarray(eps_ladder, dtype=float))[::-1]
    if eps.size == 0 or np.any(eps <= 0):
        raise DomainError("eps_ladder must hold positive values")
    phases = arg_delta_upper(pair, grid[keep], eps)
    xi_keep = _lagrange_at_zero(eps, phases / math.pi) if eps.size > 1 else phases[0] / math.pi
    xi = np.empty(grid.size)
    xi[keep] = xi_keep
    if not keep.all():
        kept = np.flatnonzero(keep)
        for i in np.flatnonzero(~keep):
            xi[i] = xi[kept[np.argmin(np.abs(kept - i))]]
    return SSFSample(grid, xi, "arg_limit")


@dataclass(frozen=True)
class CheckResult:
    lhs: float
    rhs: float
    diff: float


def _poly_eval(c: np.ndarray, x) -> np.ndarray:
    return np.polynomial.polynomial.polyval(x, c)


def trace_formula_check(pair: OperatorPair, f: Sequence[float]) -> CheckResult:
    """Tr(f(H) - f(H0)) against the integral of f' xi.

    ``f`` holds ascending real polynomial coefficients (degree <= 8). Since
    the counting SSF is constant between consecutive eigenvalues the right
    side is sum_k xi_k (f(b_{k+1}) - f(b_k)), which is exact.
    """
    c = np.asarray(f, dtype=float)
    if c.ndim != 1 or c.size == 0 or c.size > 9:
        raise DomainError("f must be a polynomial of degree <= 8 (at most 9 coefficients)")
    lhs = float(np.sum(_poly_eval(c, pair.eig_H)) - np.sum(_poly_eval(c, pair.eig_H0)))
    st = ssf_steps(pair)
    if st.breaks.size < 2:
        rhs = 0.0
    else:
        fb = _poly_eval(c, st.breaks)
        rhs = float(np.sum(st.values * np.diff(fb)))
    return CheckResult(lhs, rhs, abs(lhs - rhs))


def ssf_l1_bound_check(pair: OperatorPair) -> tuple[float, float]:
    """(integral of |xi|, trace norm of V)."""
    return ssf_steps(pair).abs_integral(), pair.trace_norm_V


def dunford_taylor(
    f: Callable[[complex], complex],
    M,
    center: complex,
    radius: float,
    n_nodes: int = DT_NODES,
) -> np.ndarray:
    """f(M) = (1/2 pi i) contour integral of f(lam) (lam - M)^-1 over a circle.

    The trapezoid rule on ``n_nodes`` equispaced nodes converges
    geometrically for integrands analytic in an annulus around the circle.
    """
    A = as_square(M)
    n = A.shape[0]
    center = complex(center)
    if radius <= 0:
        raise ContourError("radius must be positive")
    if n == 0:
        return A.copy()
    eigs = np.linalg.eigvals(A)
    reach = np.max(np.abs(eigs - center))
    if reach >= 0.9 * radius:
        raise ContourError(
            f"eigenvalues reach {reach:.4g} from the centre; radius {radius:.4g} "
            "leaves less than 10% margin"
        )
    theta = 2 * np.pi * np.arange(n_nodes) / n_nodes
    nodes = center + radius * np.exp(1j * theta)
    I = np.eye(n, dtype=complex)
    out = np.zeros((n, n), dtype=complex)
    bound = 1e12 / max(radius - reach, 1e-300)
    for lam in nodes:
        R = np.linalg.solve(lam * I - A, I)
        if not np.all(np.isfinite(R)) or np.linalg.norm(R, 2) > bound:
            raise ContourError(f"resolvent blows up at lambda = {lam}")
        # d lam = i (lam - c) d theta, and the i cancels the 1/(2 pi i)
        out += complex(f(lam)) * (lam - center) * R
    return out / n_nodes


def eig_function(f: Callable[[complex], complex], M) -> np.ndarray:
    """f(M) for Hermitian M through the eigendecomposition."""
    w, U = jacobi_eigh(M)
    return (U * np.array([complex(f(x)) for x in w])) @ U.conj().T


@dataclass(frozen=True, eq=False)
class KernelGrid:
    """Samples of K(x, y) on a tensor grid with product quadrature weights."""

    nodes_x: np.ndarray
    nodes_y: np.ndarray
    values: np.ndarray
    weights: np.ndarray
    area: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        shape = (len(self.nodes_x), len(self.nodes_y))
        if w.shape != shape or v.shape != shape:
            raise DomainError(f"weights/values must have shape {shape}")
        if np.any(w <= 0):
            raise DomainError("quadrature weights must be positive")
        if abs(w.sum() - self.area) > 1e-12 * max(1.0, abs(self.area)):
            raise DomainError(f"weights sum to {w.sum()!r}, rectangle area is {self.area!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(
        cls,
        K: Callable,
        x_range: tuple[float, float],
        y_range: tuple[float, float],
        n: int = 32,
        rule: str = "gauss",
    ) -> "KernelGrid":
        xs, wx = _rule(rule, *x_range, n)
        ys, wy = _rule(rule, *y_range, n)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        vals = np.asarray(K(X, Y), dtype=complex) * np.ones_like(X)
        area = (x_range[1] - x_range[0]) * (y_range[1] - y_range[0])
        return cls(xs, ys, vals, np.outer(wx, wy), area)


def _rule(rule: str, a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    if b <= a or n < 2:
        raise DomainError("need b > a and at least 2 nodes")
    if rule == "gauss":
        t, w = np.polynomial.legendre.leggauss(n)
        return (a + b) / 2 + (b - a) / 2 * t, (b - a) / 2 * w
    if rule == "trapezoid":
        x = np.linspace(a, b, n)
        w = np.full(n, (b - a) / (n - 1))
        w[[0, -1]] /= 2
        return x, w
    raise DomainError(f"unknown quadrature rule {rule!r}")


def hs_norm_discrete(K: KernelGrid) -> float:
    """sum_ij w_ij |K(x_i, y_j)|^2, the quadrature form of ||T_K||_2^2."""
    return float(np.sum(K.weights * np.abs(K.values) ** 2))


def sphere_surface_area(k: int) -> float:
    """Surface area k pi^(k/2) / Gamma(1 + k/2) of the unit sphere in R^k."""
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool) or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    return k * math.pi ** (k / 2) / math.gamma(1 + k / 2)
