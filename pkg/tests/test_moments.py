import numpy as np
import pytest
from numpy.testing import assert_allclose

from classes import PositiveDefinitenessError
from conformal.Geometry import build_curve, discretize_measure, DiscretizedMeasure
from conformal.Moments import moment_matrix, inner_product
from conformal.Hessenberg import hessenberg_arnoldi, orthonormal_basis


def test_hermitian_positive_definite(cross_measure):
    M = moment_matrix(cross_measure, 9)
    assert_allclose(M.entries, M.entries.conj().T, atol=0)
    assert np.all(np.linalg.eigvalsh(M.entries) > 0)
    assert_allclose(M.factor.dot(M.factor.conj().T), M.entries, atol=1e-14)


def test_leading_block_is_stable(cross_measure):
    small = moment_matrix(cross_measure, 5)
    large = moment_matrix(cross_measure, 8)
    assert np.array_equal(small.entries, large.entries[:5, :5])


def test_circle_moments_are_identity(circle_measure):
    M = moment_matrix(circle_measure, 12)
    assert_allclose(M.entries, np.eye(12), atol=1e-14)
    assert M.condition_estimate == pytest.approx(1.0, abs=1e-12)


def test_interval_entries():
    measure = discretize_measure(build_curve({'kind': 'interval', 'a': -1, 'b': 1}), 64)
    M = moment_matrix(measure, 4)
    # int x^(j+k) dx / 2 = 1/(j+k+1) for even j+k
    expected = np.array([[1, 0, 1 / 3., 0], [0, 1 / 3., 0, 1 / 5.], [1 / 3., 0, 1 / 5., 0], [0, 1 / 5., 0, 1 / 7.]])
    assert_allclose(M.entries, expected, atol=1e-15)


def test_rank_deficient_measure_reports_pivot():
    # Three distinct atoms cannot carry a positive definite 4 x 4 moment matrix
    measure = DiscretizedMeasure([0.0, 1.0, 1.0, 1j], [0.25, 0.25, 0.25, 0.25], [4])
    with pytest.raises(PositiveDefinitenessError) as err:
        moment_matrix(measure, 4)
    assert err.value.pivot == 4
    assert isinstance(err.value, RuntimeError)


def test_extended_precision_matches_double(interval_measure):
    double = moment_matrix(interval_measure, 8)
    extended = moment_matrix(interval_measure, 8, precision='extended', digits=30)
    assert extended.precision == 'extended'
    assert_allclose(extended.entries, double.entries, atol=1e-15)


def test_extended_precision_digits():
    measure = discretize_measure(build_curve({'kind': 'interval', 'a': -1, 'b': 1}), 16)
    with pytest.raises(ValueError):
        moment_matrix(measure, 4, precision='extended', digits=10)
    with pytest.raises(ValueError):
        moment_matrix(measure, 4, precision='quad')


def test_inner_product(interval_measure):
    # <x, x> = 1/3 and <1 + x, 1 - x> = 1 - 1/3
    assert_allclose(inner_product(interval_measure, [0, 1], [0, 1]), 1.0 / 3, rtol=1e-14)
    assert_allclose(inner_product(interval_measure, [1, 1], [1, -1]), 2.0 / 3, rtol=1e-14)
    with pytest.raises(ValueError):
        inner_product(interval_measure, [], [1])


def test_cross_order_two(cross_measure):
    M = moment_matrix(cross_measure, 2)
    assert M.entries[0, 0] == pytest.approx(1.0, abs=1e-15)
    assert M.entries[1, 1] == pytest.approx(1.0 / 3, abs=1e-15)
    assert abs(M.entries[0, 1]) < 1e-15
    # z^2 integrates to zero, the imaginary arms cancel the real ones
    assert abs(cross_measure.moment(2, 0)) < 1e-15


def test_inner_product_odd_symmetry(cross_measure):
    assert abs(inner_product(cross_measure, [0, 1], [1])) < 1e-15


def test_inner_product_matches_recurrence_coefficients(cross_measure):
    section = hessenberg_arnoldi(cross_measure, 9)
    basis = orthonormal_basis(section)
    for j in range(8):
        zP = np.concatenate([[0], basis.coeffs[j, :j + 1]])
        for k in range(9):
            expected = section.d(k + 1, j + 1) if k <= j + 1 else 0
            value = inner_product(cross_measure, zP, basis.coeffs[k, :k + 1])
            assert value == pytest.approx(expected, abs=1e-10)
