import math

import numpy as np
import pytest

from lame_spectra.errors import ContourError, DomainError, GridCoverageError, NotHermitianError
from lame_spectra.krein import (
    KernelGrid,
    OperatorPair,
    SSFSample,
    counting_ssf,
    dunford_taylor,
    eig_function,
    hs_norm_discrete,
    perturbation_determinant,
    random_hermitian,
    random_pair,
    sphere_surface_area,
    ssf_l1_bound_check,
    ssf_steps,
    ssf_via_arg,
    trace_formula_check,
)
from lame_spectra.linalg import expm, jacobi_eigh


def pair_1x1():
    return OperatorPair(np.array([[0.0]]), np.array([[1.0]]))


def test_jacobi_against_numpy():
    rng = np.random.default_rng(0)
    for n in range(1, 9):
        M = random_hermitian(n, rng)
        w, U = jacobi_eigh(M)
        assert np.abs(w - np.linalg.eigvalsh(M)).max() < 1e-12 * max(1, np.abs(w).max())
        assert np.abs(U.conj().T @ U - np.eye(n)).max() < 1e-12
        assert np.abs(M @ U - U * w).max() < 1e-11


def test_expm_against_scipy():
    from scipy.linalg import expm as sexpm

    rng = np.random.default_rng(1)
    M = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    want = sexpm(M)
    assert np.abs(expm(M) - want).max() < 1e-11 * np.abs(want).max()


def test_pair_validation():
    with pytest.raises(NotHermitianError):
        OperatorPair(np.array([[0, 1], [0, 0]]), np.zeros((2, 2)))
    with pytest.raises(DomainError):
        OperatorPair(np.zeros((2, 2)), np.zeros((3, 3)))


def test_rank_and_norms():
    rng = np.random.default_rng(2)
    p = random_pair(5, 2, rng)
    assert p.rank_V == 2
    assert abs(p.trace_norm_V - np.abs(np.linalg.svd(p.V, compute_uv=False)).sum()) < 1e-10


def test_pair_json_roundtrip():
    p = random_pair(3, 1, np.random.default_rng(3))
    q = OperatorPair.from_json(p.to_json())
    assert np.array_equal(p.H, q.H) and np.array_equal(p.H0, q.H0)


def test_counting_1x1():
    grid = np.linspace(-1, 2, 31)
    s = counting_ssf(pair_1x1(), grid)
    want = ((grid >= 0) & (grid < 1)).astype(float)
    assert np.array_equal(s.xi, want)


def test_counting_two_shifts():
    p = OperatorPair(np.diag([0.0, 2.0]), np.diag([1.0, 3.0]))
    grid = np.array([-0.5, 0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5])
    assert counting_ssf(p, grid).xi.tolist() == [0, 1, 1, 0, 0, 1, 1, 0, 0]


def test_counting_integral_equals_trace():
    p = random_pair(5, 2, np.random.default_rng(4))
    assert abs(ssf_steps(p).integral() - p.trace_V) < 1e-8
    e = np.concatenate([p.eig_H, p.eig_H0])
    s = counting_ssf(p, np.linspace(e.min() - 1, e.max() + 1, 200001))
    assert abs(s.trapezoid() - p.trace_V) < 1e-3


def test_counting_grid_errors():
    with pytest.raises(GridCoverageError):
        counting_ssf(pair_1x1(), [0.5, 2.0])
    with pytest.raises(GridCoverageError):
        counting_ssf(pair_1x1(), [2.0, -1.0])


def test_perturbation_determinant():
    assert abs(perturbation_determinant(pair_1x1(), 1j) - (1 + 1j)) < 1e-15
    p = OperatorPair(np.eye(2), np.eye(2))
    assert perturbation_determinant(p, 0.3 + 2j) == 1
    with pytest.raises(DomainError):
        perturbation_determinant(p, 1.0)


def test_perturbation_determinant_symmetry_and_limit():
    rng = np.random.default_rng(5)
    for _ in range(10):
        p = random_pair(4, 2, rng)
        z = complex(*rng.normal(size=2))
        assert abs(perturbation_determinant(p, z.conjugate()) - perturbation_determinant(p, z).conjugate()) < 1e-12
        T = 1e3
        d = perturbation_determinant(p, 0.3 + 1j * T)
        assert abs(abs(d) - 1) < 1e-2 * p.trace_norm_V / T


def test_perturbation_determinant_matches_det_form():
    p = random_pair(4, 2, np.random.default_rng(6))
    z = 0.2 + 0.7j
    I = np.eye(4)
    want = np.linalg.det((p.H - z * I) @ np.linalg.inv(p.H0 - z * I))
    assert abs(perturbation_determinant(p, z) - want) < 1e-12 * abs(want)


def test_rank_one_determinant_formula():
    # 1 + gamma <(H0 - z)^-1 phi, phi>
    rng = np.random.default_rng(7)
    H0 = random_hermitian(4, rng)
    phi = rng.normal(size=4) + 1j * rng.normal(size=4)
    gamma = 0.8
    p = OperatorPair.from_perturbation(H0, gamma * np.outer(phi, phi.conj()))
    z = 0.1 + 0.5j
    want = 1 + gamma * phi.conj() @ np.linalg.solve(H0 - z * np.eye(4), phi)
    assert abs(perturbation_determinant(p, z) - want) < 1e-12


def test_arg_limit_1x1():
    grid = np.arange(-1, 2, 0.01) + 0.003
    a = ssf_via_arg(pair_1x1(), grid)
    c = counting_ssf(pair_1x1(), grid)
    assert np.abs(a.xi - c.xi).max() < 0.02


def test_arg_limit_zero_perturbation():
    H0 = random_hermitian(3, np.random.default_rng(8))
    p = OperatorPair(H0, H0.copy())
    assert np.abs(ssf_via_arg(p, np.linspace(-5, 5, 101)).xi).max() < 1e-12


def test_arg_limit_rank_one_positive_bounds():
    rng = np.random.default_rng(9)
    p = random_pair(4, 1, rng, positive=True)
    e = np.concatenate([p.eig_H0, p.eig_H])
    xi = ssf_via_arg(p, np.linspace(e.min() - 1, e.max() + 1, 997), None).xi
    assert xi.min() >= -0.02 and xi.max() <= 1.02


def test_arg_limit_skips_points_on_eigenvalues():
    p = pair_1x1()
    grid = np.array([-0.5, 0.0, 0.5, 1.0, 1.5])
    a = ssf_via_arg(p, grid)
    assert np.all(np.isfinite(a.xi))
    assert abs(a.xi[2] - 1) < 0.02


def test_sample_csv_roundtrip():
    s = counting_ssf(pair_1x1(), np.linspace(-1, 2, 7))
    text = s.to_csv()
    assert text.splitlines()[0] == "lambda,xi,method"
    back = SSFSample.from_csv(text)
    assert np.array_equal(back.grid, s.grid) and np.array_equal(back.xi, s.xi)


def test_trace_formula_examples():
    p = OperatorPair(np.diag([0.0, 2.0]), np.diag([1.0, 3.0]))
    r = trace_formula_check(p, [0, 0, 1])
    assert r.lhs == 6 and r.rhs == 6
    q = random_pair(4, 2, np.random.default_rng(10))
    r = trace_formula_check(q, [0, 1])
    assert abs(r.lhs - q.trace_V) < 1e-12 and abs(r.rhs - q.trace_V) < 1e-12


def test_trace_formula_degree5():
    rng = np.random.default_rng(11)
    p = random_pair(6, 3, rng)
    r = trace_formula_check(p, rng.normal(size=6))
    assert r.diff < 1e-8 * (1 + abs(r.lhs))


def test_trace_formula_degree_cap():
    with pytest.raises(DomainError):
        trace_formula_check(pair_1x1(), np.ones(10))


def test_l1_bound_examples():
    phi = np.array([1.0, 1.0j]) / math.sqrt(2)
    p = OperatorPair.from_perturbation(np.diag([0.0, 1.0]), 0.7 * np.outer(phi, phi.conj()))
    l1, tn = ssf_l1_bound_check(p)
    assert abs(l1 - 0.7) < 1e-12 and abs(tn - 0.7) < 1e-12
    l1, tn = ssf_l1_bound_check(OperatorPair(np.zeros((2, 2)), np.diag([1.0, -1.0])))
    assert l1 == 2 and tn == 2


def test_positive_perturbation_nonnegative_ssf():
    rng = np.random.default_rng(12)
    for _ in range(20):
        p = random_pair(int(rng.integers(2, 8)), int(rng.integers(1, 4)), rng, positive=True)
        assert ssf_steps(p).values.min() >= 0


def test_dunford_taylor_examples():
    M = np.diag([1.0, 2.0])
    assert np.abs(dunford_taylor(lambda z: z, M, 1.5, 2) - M).max() < 1e-13
    assert np.abs(dunford_taylor(lambda z: 1, M, 1.5, 2) - np.eye(2)).max() < 1e-13


def test_dunford_taylor_exp():
    rng = np.random.default_rng(13)
    M = random_hermitian(4, rng)
    r = 1.5 * np.abs(np.linalg.eigvalsh(M)).max() + 0.5
    want = eig_function(np.exp, M)
    assert np.abs(dunford_taylor(np.exp, M, 0, r) - want).max() < 1e-8 * np.abs(want).max()


def test_dunford_taylor_resolvent_function():
    rng = np.random.default_rng(14)
    M = random_hermitian(3, rng)
    r = 1.5 * np.abs(np.linalg.eigvalsh(M)).max() + 0.5
    c = 3 * r
    want = np.linalg.inv(c * np.eye(3) - M)
    got = dunford_taylor(lambda z: 1 / (c - z), M, 0, r)
    assert np.abs(got - want).max() < 1e-8 * np.abs(want).max()


def test_dunford_taylor_contour_errors():
    with pytest.raises(ContourError):
        dunford_taylor(np.exp, np.diag([0.0, 1.9]), 0, 2)


def test_hs_norm():
    one = KernelGrid.from_function(lambda x, y: np.ones_like(x), (0, 1), (0, 1))
    assert abs(hs_norm_discrete(one) - 1) < 1e-14
    xy = KernelGrid.from_function(lambda x, y: x * y, (0, 1), (0, 1), n=32)
    assert abs(hs_norm_discrete(xy) - 1 / 9) < 1e-10
    zero = KernelGrid.from_function(lambda x, y: 0 * x, (0, 1), (0, 1))
    assert hs_norm_discrete(zero) == 0
    trap = KernelGrid.from_function(lambda x, y: x * y, (0, 1), (0, 1), n=400, rule="trapezoid")
    assert abs(hs_norm_discrete(trap) - 1 / 9) < 1e-5


def test_kernel_grid_weight_checks():
    with pytest.raises(DomainError):
        KernelGrid(np.zeros(2), np.zeros(2), np.zeros((2, 2)), np.full((2, 2), 0.3), 1.0)


def test_sphere_areas():
    assert abs(sphere_surface_area(2) - 2 * math.pi) < 1e-12
    assert abs(sphere_surface_area(3) - 4 * math.pi) < 1e-12
    assert abs(sphere_surface_area(1) - 2) < 1e-12
    assert abs(sphere_surface_area(4) - 2 * math.pi ** 2) < 1e-12
    with pytest.raises(DomainError):
        sphere_surface_area(0)
