"""sl(2, C) spin modules, the quantum Euler top and its characteristic polynomial.

The generators act on polynomials of degree <= 2j through

    J-  = d/dw,   J0 = w d/dw - j,   J+ = w^2 d/dw - 2j w

and are stored as matrices on the monomial basis 1, w, ..., w^(2j), with
column k holding the image of w^k.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import as_square, expm, matrix_from_json, matrix_to_json
from .polynomial import ComplexPoly, hausdorff, lame_spectral_poly, match_roots, poly_roots

CHARPOLY_MAX_DIM = 64
TRACE_LOG_DET_MAX_DIM = 16


def as_spin(j) -> Fraction:
    """Validate a half-integer spin (2j a nonnegative integer)."""
    try:
        fj = Fraction(j).limit_denominator(2) if isinstance(j, float) else Fraction(j)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"spin must be a half-integer, got {j!r}") from exc
    if isinstance(j, float) and abs(float(fj) - j) > 1e-12:
        raise DomainError(f"spin must be a half-integer, got {j!r}")
    if (2 * fj).denominator != 1 or fj < 0:
        raise DomainError(f"spin must be a nonnegative half-integer, got {j!r}")
    return fj


def sl2_generators(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(J+, J0, J-) as (2j+1)x(2j+1) complex matrices."""
    j = as_spin(j)
    n = int(2 * j) + 1
    jf = float(j)
    Jp = np.zeros((n, n), dtype=complex)
    J0 = np.zeros((n, n), dtype=complex)
    Jm = np.zeros((n, n), dtype=complex)
    for k in range(n):
        J0[k, k] = k - jf
        if k >= 1:
            Jm[k - 1, k] = k
        if k + 1 < n:
            Jp[k + 1, k] = k - 2 * jf
    return Jp, J0, Jm


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


@dataclass(frozen=True)
class EulerTopMatrix:
    s: int
    j: Fraction
    g2: complex
    g3: complex
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def rebuild(self) -> np.ndarray:
        return _assemble(self.j, self.g2, self.g3)

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "j": [self.j.numerator, self.j.denominator],
            "g2": [self.g2.real, self.g2.imag],
            "g3": [self.g3.real, self.g3.imag],
            "matrix": matrix_to_json(self.matrix),
        }

    @classmethod
    def from_json(cls, data: dict) -> "EulerTopMatrix":
        return cls(
            int(data["s"]),
            Fraction(*data["j"]),
            complex(*data["g2"]),
            complex(*data["g3"]),
            matrix_from_json(data["matrix"]),
        )


def _assemble(j: Fraction, g2: complex, g3: complex) -> np.ndarray:
    Jp, J0, Jm = sl2_generators(j)
    jf = float(j)
    return (
        4 * Jp @ Jp
        - g2 * J0 @ J0
        - (g3 / 2) * Jm @ J0
        - ((3 * jf - 1) / 4) * g2 * J0
        - (3 / 16) * (3 * jf - 1) ** 2 * g2 * Jm
    )


def build_euler_top(s: int, g2: complex, g3: complex, j=None) -> EulerTopMatrix:
    """Assemble

        H_s = 4 J+^2 - g2 J0^2 - (g3/2) J- J0 - ((3j-1)/4) g2 J0
              - (3/16)(3j-1)^2 g2 J-

    on the spin-j module. ``j`` defaults to ``s`` so that the matrix has the
    2s+1 rows a degree-(2s+1) characteristic polynomial needs; pass
    ``j=Fraction(3*s, 2)`` for the spin quoted alongside the operator.
    """
    if not isinstance(s, (int, np.integer)) or isinstance(s, bool) or s < 1:
        raise DomainError(f"s must be a positive integer, got {s!r}")
    j = as_spin(s if j is None else j)
    g2, g3 = complex(g2), complex(g3)
    return EulerTopMatrix(int(s), j, g2, g3, _assemble(j, g2, g3))


def charpoly(M) -> ComplexPoly:
    """det(E I - M) by the Faddeev-LeVerrier trace recursion.

    With N_0 = I and c_n = 1,

        c_{n-k} = -tr(M N_{k-1}) / k,   N_k = M N_{k-1} + c_{n-k} I.
    """
    A = as_square(M)
    n = A.shape[0]
    if n > CHARPOLY_MAX_DIM:
        raise DimensionError(f"charpoly supports dim <= {CHARPOLY_MAX_DIM}, got {n}")
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    N = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        AN = A @ N
        c[n - k] = -np.trace(AN) / k
        N = AN + c[n - k] * np.eye(n)
    return ComplexPoly(c)


@dataclass(frozen=True)
class TraceLogDet:
    lhs: complex
    rhs: complex
    diff: float


def _wrap_2pi_i(d: complex) -> complex:
    im = math.remainder(d.imag, 2 * math.pi)
    return complex(d.real, im)


def trace_log_det_check(M) -> TraceLogDet:
    """Compare tr(M) with ln det(exp(M)).

    The logarithm of the determinant is the sum of logarithms of the
    eigenvalues of exp(M), so only a 2*pi*i ambiguity remains; ``diff`` is
    |lhs - rhs| with the imaginary part reduced modulo 2*pi.
    """
    A = as_square(M)
    n = A.shape[0]
    if n > TRACE_LOG_DET_MAX_DIM:
        raise DimensionError(f"trace_log_det_check supports dim <= {TRACE_LOG_DET_MAX_DIM}")
    lhs = complex(np.trace(A))
    if n == 0:
        return TraceLogDet(0j, 0j, 0.0)
    mu = np.linalg.eigvals(expm(A))
    rhs = complex(sum(cmath.log(m) for m in mu))
    return TraceLogDet(lhs, rhs, abs(_wrap_2pi_i(lhs - rhs)))


def spectral_poly_diagnostic(s: int, g2: complex, g3: complex, j=None) -> dict:
    """Compare det(E - H_s) with the closed-form product polynomial.

    Nothing is asserted: the two sides may differ in degree (spin 3s/2) and
    in value, and the report records by how much.
    """
    top = build_euler_top(s, g2, g3, j)
    mat_poly = charpoly(top.matrix)
    prod_poly = lame_spectral_poly(s, g2)
    mat_roots = np.sort_complex(poly_roots(mat_poly)) if mat_poly.degree >= 1 else np.array([])
    eig_roots = np.sort_complex(np.linalg.eigvals(top.matrix))
    prod_roots = np.sort_complex(np.array(
        [jj * (jj + 1) * complex(g2) / 4 + 3 * jj * (3 * jj - 1) / 4 for jj in range(2 * s + 1)]
    ))
    same_degree = mat_poly.degree == prod_poly.degree
    report = {
        "s": int(s),
        "j": str(top.j),
        "g2": complex(g2),
        "g3": complex(g3),
        "matrix_degree": mat_poly.degree,
        "product_degree": prod_poly.degree,
        "degree_mismatch": not same_degree,
        "matrix_charpoly": list(mat_poly.coeffs),
        "product_poly": list(prod_poly.coeffs),
        "matrix_roots": list(mat_roots),
        "matrix_eigenvalues": list(eig_roots),
        "product_roots": list(prod_roots),
        "root_set_hausdorff": hausdorff(mat_roots, prod_roots),
    }
    if same_degree:
        diffs = mat_poly.coeffs - prod_poly.coeffs
        report["coefficient_diff"] = list(diffs)
        report["max_coefficient_diff"] = float(np.max(np.abs(diffs)))
        report["root_matching_distance"] = match_roots(mat_roots, prod_roots)[0]
    else:
        report["coefficient_diff"] = None
        report["max_coefficient_diff"] = None
        report["root_matching_distance"] = None
    report["agree"] = bool(
        same_degree and report["root_matching_distance"] <= 1e-8 * max(1.0, max(abs(prod_roots)))
    )
    return report
