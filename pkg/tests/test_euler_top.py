from fractions import Fraction

import numpy as np
import pytest

from lame_spectra.errors import DimensionError, DomainError
from lame_spectra.euler_top import (
    EulerTopMatrix,
    build_euler_top,
    charpoly,
    commutator,
    sl2_generators,
    spectral_poly_diagnostic,
    trace_log_det_check,
)
from lame_spectra.polynomial import band_edge_values

SPINS = [Fraction(k, 2) for k in range(21)]


def test_spin_half():
    Jp, J0, Jm = sl2_generators(Fraction(1, 2))
    assert np.array_equal(J0, np.diag([-0.5, 0.5]))
    assert np.array_equal(commutator(Jm, Jp), 2 * J0)


def test_spin_one_raising():
    Jp, J0, Jm = sl2_generators(1)
    assert Jp[1, 0] == -2 and Jp[2, 1] == -1
    assert np.count_nonzero(Jp) == 2
    assert np.array_equal(commutator(J0, Jp), Jp)


def test_action_on_monomials():
    j = Fraction(5, 2)
    Jp, J0, Jm = sl2_generators(j)
    n = 6
    for k in range(n):
        e = np.zeros(n)
        e[k] = 1
        if k:
            assert (Jm @ e)[k - 1] == k
        assert (J0 @ e)[k] == k - float(j)
        if k + 1 < n:
            assert (Jp @ e)[k + 1] == k - 2 * float(j)


@pytest.mark.parametrize("j", SPINS, ids=str)
def test_commutation_relations(j):
    Jp, J0, Jm = sl2_generators(j)
    assert np.abs(commutator(J0, Jp) - Jp).max() < 1e-12
    assert np.abs(commutator(Jm, Jp) - 2 * J0).max() < 1e-12
    assert np.abs(commutator(Jm, J0) - Jm).max() < 1e-12


def test_bad_spin():
    for bad in (-1, Fraction(1, 3), 0.3, "x"):
        with pytest.raises(DomainError):
            sl2_generators(bad)


def test_euler_top_zero_invariants():
    top = build_euler_top(1, 0, 0)
    Jp, _, _ = sl2_generators(1)
    assert np.array_equal(top.matrix, 4 * Jp @ Jp)
    assert np.linalg.matrix_rank(top.matrix) <= 1


def test_euler_top_sizes():
    assert build_euler_top(1, 4, 0).dim == 3
    assert charpoly(build_euler_top(1, 4, 0).matrix).degree == 3
    assert build_euler_top(2, 4, 1).dim == 5
    assert build_euler_top(2, 4, 1, j=Fraction(3)).dim == 7


def test_euler_top_rebuild_and_json():
    top = build_euler_top(2, 1.5 + 0.5j, -0.7)
    assert np.abs(top.rebuild() - top.matrix).max() < 1e-12
    back = EulerTopMatrix.from_json(top.to_json())
    assert back.j == top.j and np.array_equal(back.matrix, top.matrix)


def test_charpoly_small():
    assert np.allclose(charpoly(np.eye(2)).coeffs, [1, -2, 1])
    assert np.allclose(charpoly(np.diag([1, 2, 3])).coeffs, [-6, 11, -6, 1])


def test_charpoly_vs_eigensolver():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    p = charpoly(M)
    scale = np.max(np.abs(p.coeffs))
    assert max(abs(p(lam)) for lam in np.linalg.eigvals(M)) < 1e-7 * scale


def test_charpoly_hermitian_real():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7))
    p = charpoly(X + X.conj().T)
    assert np.abs(p.coeffs.imag).max() < 1e-10 * max(1, np.abs(p.coeffs).max())


def test_charpoly_dimension_cap():
    with pytest.raises(DimensionError):
        charpoly(np.eye(65))


def test_trace_log_det_examples():
    r = trace_log_det_check(np.diag([1.0, 2.0]))
    assert r.lhs == 3 and abs(r.rhs - 3) < 1e-14
    r = trace_log_det_check(np.zeros((3, 3)))
    assert r.lhs == 0 and abs(r.rhs) < 1e-15


def test_trace_log_det_hermitian():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert trace_log_det_check(X + X.conj().T).diff < 1e-8


def test_trace_log_det_wraps_2pi():
    # trace 4 pi i: ln det exp(M) lands on the principal branch, diff reduced mod 2 pi i
    r = trace_log_det_check(np.diag([2j * np.pi, 2j * np.pi]))
    assert r.diff < 1e-12


def test_trace_log_det_cap():
    with pytest.raises(DimensionError):
        trace_log_det_check(np.eye(17))


def test_diagnostic_reports_without_asserting():
    rep = spectral_poly_diagnostic(1, 0, 0)
    assert np.allclose(sorted(np.real(rep["product_roots"])), [0, 1.5, 7.5])
    assert len(rep["matrix_roots"]) == 3
    assert rep["matrix_degree"] == 3 and rep["product_degree"] == 3


def test_diagnostic_degree_mismatch_at_three_halves_spin():
    rep = spectral_poly_diagnostic(1, 0, 0, j=Fraction(3, 2))
    assert rep["matrix_degree"] == 4 and rep["product_degree"] == 3
    assert rep["degree_mismatch"] and rep["coefficient_diff"] is None


def test_diagnostic_factor_roots_are_printed_formula():
    for s in range(1, 5):
        rep = spectral_poly_diagnostic(s, 2.0, 1.0)
        assert rep["product_degree"] == 2 * s + 1
        assert sorted(rep["product_roots"], key=abs) == sorted(band_edge_values(s, 2.0), key=abs)
