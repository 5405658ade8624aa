import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from classes import ArnoldiBreakdown
from conformal.Geometry import build_curve, discretize_measure, DiscretizedMeasure
from conformal.Moments import moment_matrix
from conformal.Hessenberg import (hessenberg_arnoldi, hessenberg_from_moments, closed_form_arc_hessenberg,
                                  jacobi_interval, circle_shift, orthonormal_basis, characteristic_polynomial,
                                  verify_recurrence)

s3, s5, s7, s11, s13, s15, s17 = (math.sqrt(k) for k in (3, 5, 7, 11, 13, 15, 17))

# Nonzero entries (i, j) of the 9 x 9 section for the uniform measure on [-1, 1] U [-i, i]
CROSS_9X9 = {
    (1, 4): s7 / 5, (1, 8): -2 * s15 / 45,
    (2, 1): s3 / 3, (2, 5): 2 * s3 / 5, (2, 9): -4 * s3 * s17 / 231,
    (3, 2): s5 * s3 / 5, (3, 6): 2 * s5 * s11 / 45,
    (4, 3): s7 * s5 / 7, (4, 7): 2 * s7 * s13 / 77,
    (5, 4): 4 * s7 / 15, (5, 8): 19 * s15 / 195,
    (6, 5): 15 * s11 / 77, (6, 9): 12 * s11 * s17 / 385,
    (7, 6): 7 * s13 * s11 / 117,
    (8, 7): 3 * s15 * s13 / 55,
    (9, 8): 88 * s17 * s15 / 1989,
}


def test_circle_is_shift(circle_measure):
    section = hessenberg_arnoldi(circle_measure, 16)
    assert_allclose(section.entries, circle_shift(16).entries, atol=1e-10)


def test_interval_legendre(interval_measure):
    section = hessenberg_arnoldi(interval_measure, 30)
    j = np.arange(1, 30)
    assert_allclose(section.subdiagonal(), j / np.sqrt(4 * j ** 2 - 1), atol=1e-9)
    assert np.abs(np.diag(section.entries)).max() < 1e-10
    assert_allclose(section.entries, jacobi_interval(-1, 1, 30, 'legendre').entries, atol=1e-9)


def test_cross_golden(cross_measure):
    section = hessenberg_arnoldi(cross_measure, 9)
    expected = np.zeros((9, 9))
    for (i, j), value in CROSS_9X9.items():
        expected[i - 1, j - 1] = value
    assert_allclose(section.entries, expected, atol=1e-8)
    assert section.d(2, 1) == pytest.approx(s3 / 3, abs=1e-12)


def test_cross_golden_from_moments(cross_measure):
    section = hessenberg_from_moments(moment_matrix(cross_measure, 10), 9)
    for (i, j), value in CROSS_9X9.items():
        assert section.d(i, j) == pytest.approx(value, abs=1e-8)


@pytest.mark.parametrize('kind,n,precision', [
    ('circle', 20, 'double'),
    ('cross', 20, 'double'),
    ('interval', 10, 'double'),
    ('interval', 20, 'extended'),
])
def test_arnoldi_matches_moments(kind, n, precision, circle_measure, cross_measure, interval_measure):
    measure = {'circle': circle_measure, 'cross': cross_measure, 'interval': interval_measure}[kind]
    arnoldi = hessenberg_arnoldi(measure, n)
    moments = hessenberg_from_moments(moment_matrix(measure, n + 1, precision), n)
    assert_allclose(moments.entries, arnoldi.entries, atol=1e-8)


def test_characteristic_polynomial_is_monic_orthogonal(cross_measure, interval_measure):
    for measure in (cross_measure, interval_measure):
        M = moment_matrix(measure, 9)
        C = np.linalg.inv(M.factor)
        section = hessenberg_arnoldi(measure, 8)
        for n in range(1, 9):
            monic = C[n, :n + 1] / C[n, n]
            assert_allclose(characteristic_polynomial(section, n), monic, atol=1e-7)


def test_characteristic_polynomial_of_shift():
    # Nilpotent shift: z^n
    assert_allclose(characteristic_polynomial(circle_shift(6)), [0, 0, 0, 0, 0, 0, 1], atol=0)


def test_recurrence_residual(cross_measure, interval_measure):
    assert verify_recurrence(hessenberg_arnoldi(interval_measure, 12), interval_measure) < 1e-9
    assert verify_recurrence(hessenberg_arnoldi(cross_measure, 9), cross_measure) < 1e-9
    # Basis taken from the Cholesky factor
    section = hessenberg_from_moments(moment_matrix(cross_measure, 10), 9)
    assert verify_recurrence(section, cross_measure) < 1e-9


def test_recurrence_residual_detects_wrong_matrix(interval_measure):
    wrong = jacobi_interval(-1, 1, 10, 'limit')
    assert verify_recurrence(wrong, interval_measure) > 1e-3


def test_orthonormal_basis_leading_coefficients(cross_measure):
    section = hessenberg_arnoldi(cross_measure, 9)
    basis = orthonormal_basis(section)
    gamma = basis.leading
    assert np.all(gamma > 0)
    assert_allclose(section.subdiagonal(), gamma[:-1] / gamma[1:], rtol=1e-12)
    # P_0..P_8 are orthonormal under the discretized measure
    values = np.sqrt(cross_measure.weights)[:, None] * basis.evaluate(cross_measure.nodes)
    assert_allclose(values.conj().T.dot(values), np.eye(9), atol=1e-10)


def test_arc_closed_form_is_unitary(arc_section):
    D = arc_section.entries[:, :-1]
    # Every column except the last is complete inside the section
    assert_allclose(D.conj().T.dot(D), np.eye(80), atol=1e-12)


def test_arc_closed_form_entries():
    section = closed_form_arc_hessenberg(2.0, 6)
    rho = math.sqrt(3) / 2
    assert section.d(2, 1) == pytest.approx(rho)
    assert section.d(1, 1) == pytest.approx(-0.5)
    assert section.d(1, 3) == pytest.approx(-rho ** 2 / 2)
    assert section.d(2, 2) == pytest.approx(-0.25)
    assert section.d(3, 5) == pytest.approx(-rho ** 2 / 4)
    assert section.d(4, 2) == 0


def test_closed_form_arc_requires_a_above_one():
    with pytest.raises(ValueError):
        closed_form_arc_hessenberg(1.0, 5)


def test_breakdown_on_point_masses():
    measure = DiscretizedMeasure([0.0, 1.0, 1j], [0.5, 0.25, 0.25], [3])
    with pytest.raises(ValueError):
        hessenberg_arnoldi(measure, 3)
    measure = DiscretizedMeasure([0.0, 1.0, 1.0, 1j], [0.25, 0.25, 0.25, 0.25], [4])
    with pytest.raises(ArnoldiBreakdown) as err:
        hessenberg_arnoldi(measure, 3)
    assert err.value.step == 3


def test_moments_order_too_small(cross_measure):
    with pytest.raises(ValueError):
        hessenberg_from_moments(moment_matrix(cross_measure, 5), 5)


def test_triples_cover_hessenberg_pattern():
    triples = circle_shift(4).to_triples()
    assert len(triples) == 4 + 3 + 3
    assert (2, 1, 1.0, 0.0) in triples
    assert all(i <= j + 1 for i, j, _, _ in triples)


@pytest.mark.parametrize('kind', ['cross', 'interval'])
def test_column_norms_match_weighted_norm_of_zP(kind, cross_measure, interval_measure):
    measure = cross_measure if kind == 'cross' else interval_measure
    section = hessenberg_arnoldi(measure, 21)
    V = section.node_values
    for j in range(section.size - 1):
        column = section.column(j + 1)
        weighted = np.sum(np.abs(measure.nodes) ** 2 * np.abs(V[:, j]) ** 2)
        assert np.sum(np.abs(column) ** 2) == pytest.approx(weighted, abs=1e-10)
