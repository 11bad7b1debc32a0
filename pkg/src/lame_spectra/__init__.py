"""Numerical tools around the Lame equation in Weierstrass form.

Weierstrass elliptic functions, Lame band-edge polynomials, the sl(2)
Euler-top matrix, Krein spectral shift functions of finite Hermitian pairs,
Lame Green kernels as formal distributions, and the Brioschi-Halphen
Fourier symbol.
"""

__version__ = "0.1.0"

from .elliptic import EllipticParams, sigma, wp, wp_inverse, wp_prime, zeta
from .errors import DomainError, LameSpectraError, RootFinderWarning
from .polynomial import ComplexPoly, band_edges, lame_spectral_poly, poly_roots

__all__ = [
    "ComplexPoly",
    "DomainError",
    "EllipticParams",
    "LameSpectraError",
    "RootFinderWarning",
    "band_edges",
    "lame_spectral_poly",
    "poly_roots",
    "sigma",
    "wp",
    "wp_inverse",
    "wp_prime",
    "zeta",
]
