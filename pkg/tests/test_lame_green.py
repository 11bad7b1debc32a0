import numpy as np
import pytest

from lame_spectra.elliptic import EllipticParams, sigma, wp
from lame_spectra.errors import (
    DomainError,
    InconsistentTestFunctionError,
    InfiniteValueError,
    LatticeProximityError,
    UndefinedAtJumpError,
)
from lame_spectra.lame_green import (
    DistributionExpr,
    LameSolutionParams,
    delta_compose,
    gaussian,
    green_kernel,
    lame_residual,
    lame_solution,
    lame_ssf,
    pair,
    richardson_second_derivative,
)

D = DistributionExpr


@pytest.fixture(scope="module")
def params():
    ell = EllipticParams.from_invariants(4, 1)
    return LameSolutionParams(0.3 + 0.1j, 1.0, 0.5, ell)


def test_zero_amplitudes(params):
    p = LameSolutionParams(params.eps, 0, 0, params.elliptic)
    assert lame_solution(0.4 + 0.2j, p) == 0


def test_simple_pole_at_origin(params):
    z = 1e-5
    want = params.K1 * sigma(params.eps, params.elliptic) + params.K2 * sigma(-params.eps, params.elliptic)
    assert abs(z * lame_solution(z, params) - want) < 1e-6


def test_eps_on_lattice_rejected():
    ell = EllipticParams.from_invariants(4, 1)
    with pytest.raises(LatticeProximityError):
        LameSolutionParams(0, 1, 1, ell)
    p = LameSolutionParams(0.3, 1, 1, ell)
    with pytest.raises(LatticeProximityError):
        lame_solution(ell.basis[0], p)


def test_richardson_second_derivative():
    d2 = richardson_second_derivative(np.exp, 0.3)
    assert abs(d2 - np.exp(0.3)) < 1e-11


def _random_tuples(n=5, seed=3):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        g2 = complex(rng.normal() * 3, rng.normal())
        g3 = complex(rng.normal() * 3, rng.normal())
        ell = EllipticParams.from_invariants(g2, g3)
        L = ell.shortest_period
        eps = complex(rng.uniform(0.1, 0.4), rng.uniform(-0.3, 0.3)) * L
        p = LameSolutionParams(eps, complex(*rng.normal(size=2)), complex(*rng.normal(size=2)), ell)
        zs = []
        while len(zs) < 10:
            z = complex(*rng.uniform(-0.5, 0.5, 2)) * L
            if abs(ell.reduce(z)[0]) > 0.2 * L:
                zs.append(z)
        out.append((p, zs))
    return out


def test_solution_satisfies_lame_with_B_equal_minus_wp_eps():
    # sigma(z + e)/sigma(z) exp(-z zeta(e)) solves y'' = (2 wp(z) + wp(e)) y,
    # i.e. -y'' + 2 wp y = B y with B = -wp(e)
    for p, zs in _random_tuples():
        for z in zs:
            assert abs(lame_residual(z, p, sign=+1)) < 1e-5


def test_single_term_ode_directly():
    ell = EllipticParams.from_invariants(7, 3)
    p = LameSolutionParams(0.25 + 0.05j, 1, 0, ell)
    z = 0.45 - 0.2j
    f = lambda x: lame_solution(x, p)
    d2 = richardson_second_derivative(f, z)
    assert abs(d2 - (2 * wp(z, ell) + wp(p.eps, ell)) * f(z)) < 1e-6 * abs(f(z))


def test_pairing_rules():
    assert pair(D.delta(0.3), np.exp, np.exp) == pytest.approx(np.exp(0.3))
    assert pair(D.delta_prime(0), lambda x: x, lambda x: 1.0) == -1
    assert pair(2 * D.delta(0) + 3 * D.delta_prime(0), lambda x: x ** 2 + 1, lambda x: 2 * x) == 2


def test_pairing_linearity():
    rng = np.random.default_rng(0)
    A = D.delta(0.2, 1.5) + D.delta_prime(-0.4, 2j) + D.heaviside(0.3)
    B = D.delta(1.1, -0.5) + D.delta_prime(0.7, 1.0)
    phi, dphi = gaussian(0.1)
    for _ in range(5):
        a, b = complex(*rng.normal(size=2)), complex(*rng.normal(size=2))
        lhs = pair(a * A + b * B, phi, dphi, (-6, 6))
        rhs = a * pair(A, phi, dphi, (-6, 6)) + b * pair(B, phi, dphi, (-6, 6))
        assert abs(lhs - rhs) < 1e-13


def test_heaviside_and_smooth_parts():
    one = lambda x: np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    zero = lambda x: 0.0 * x
    assert abs(pair(D.heaviside(2.0), one, zero, (-1, 3)) - 6) < 1e-13
    smooth = D(smooth=lambda x: x)
    assert abs(pair(smooth, lambda x: x, lambda x: 1.0, (0, 1)) - 1 / 3) < 1e-14
    with pytest.raises(DomainError):
        pair(D.heaviside(), one, zero)


def test_inconsistent_test_function():
    with pytest.raises(InconsistentTestFunctionError):
        pair(D.delta(0.0), np.sin, np.sin)


def test_infinite_cannot_pair():
    with pytest.raises(InfiniteValueError):
        pair(D.infinity(), np.exp, np.exp)


def test_json_roundtrip():
    d = D(((0.5 - 0.2j, 1 + 1j),), ((0.1, -2.0),), 0.25, None, False)
    assert D.from_json(d.to_json()) == d
    assert D.from_json(D.infinity().to_json()).infinite


def test_delta_compose_scaling():
    c = delta_compose(2, 0)
    assert (c.delta_prime, c.delta, c.delta_scale) == (0.25, 0, 0.5)
    c = delta_compose(1, 0)
    assert (c.delta_prime, c.delta, c.delta_scale) == (1, 0, 1)


def test_delta_compose_square():
    # g(z) = z^2 at w = 1: g' = 2, g'' = 2, so 1/|g'|^2 = 1/4 and g''/(g'|g'|^2) = 1/4
    c = delta_compose(2, 2)
    assert c.delta_prime == 0.25 and c.delta == 0.25


def test_delta_compose_vanishing_derivative():
    with pytest.raises(DomainError):
        delta_compose(0, 1)


def test_green_kernel_zero(params):
    p = LameSolutionParams(params.eps, 0, 0, params.elliptic)
    G = green_kernel(0.3 + 0.2j, p, 0)
    assert all(c == 0 for _, c in G.delta_terms + G.delta_prime_terms)


@pytest.mark.parametrize("w", [0.4 + 0.2j, 0.4 - 0.2j, 0.7])
def test_green_kernel_pairing_identity(params, w):
    kappa = 1.3 - 0.4j
    G = green_kernel(w, params, kappa)
    loc = w if w.imag >= 0 else -w
    fw = lame_solution(loc, params)
    for c in np.linspace(-1, 1, 5):
        phi, dphi = gaussian(loc + c)
        direct = pair(G, phi, dphi)
        assert abs(direct - (kappa * phi(loc) - fw * dphi(loc)) / params.B) < 1e-12
        rearranged = pair(params.B * G - fw * D.delta_prime(loc), phi, dphi)
        assert abs(rearranged - kappa * phi(loc)) < 1e-8


def test_green_kernel_zero_eigenvalue():
    # e = 0 is a root for g3 = 0, and wp(half-period) = 0 there
    ell = EllipticParams.from_invariants(4, 0)
    w0 = next(w for w, e in zip(ell.half_periods, ell.roots) if abs(e) < 1e-12)
    p = LameSolutionParams.__new__(LameSolutionParams)
    object.__setattr__(p, "eps", w0)
    object.__setattr__(p, "K1", 1 + 0j)
    object.__setattr__(p, "K2", 0j)
    object.__setattr__(p, "elliptic", ell)
    object.__setattr__(p, "B", 0j)
    object.__setattr__(p, "zeta_eps", 0j)
    with pytest.raises(DomainError):
        green_kernel(0.3j, p, 1)


def test_lame_ssf_branches(params):
    assert lame_ssf(1.0, 0.3 + 0.2j, params, 1).infinite
    assert lame_ssf(-1.0, 0.3 + 0.2j, params, 1).infinite
    assert lame_ssf(-1.0, 0.3 - 0.2j, params, 1).value.is_zero()
    zero = LameSolutionParams(params.eps, 0, 0, params.elliptic)
    v = lame_ssf(1.0, 0.3 - 0.2j, zero, 0).value
    assert all(c == 0 for _, c in v.delta_terms + v.delta_prime_terms)
    with pytest.raises(UndefinedAtJumpError):
        lame_ssf(0.0, 0.3 - 0.2j, params, 1)


def test_lame_ssf_lower_coefficients(params):
    w, kappa = 0.3 - 0.2j, 2.0
    v = lame_ssf(0.5, w, params, kappa)
    assert v.halfplane == "lower"
    assert v.value.delta_terms == ((w, kappa / 2),)
    (loc, c), = v.value.delta_prime_terms
    assert loc == w and abs(c - lame_solution(w, params) / 4) < 1e-15
