"""
Moment (Gram) matrices of the monomials under a discretized measure, and the inner product <Q, R>_mu
"""
import math
import time

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import lapack

from classes import logger, PositiveDefinitenessError, NonFiniteError
from constants import PIVOT_TOLERANCE, DEFAULT_DIGITS, MIN_EXTENDED_DIGITS


class MomentMatrix(object):
    """
    Hermitian moment matrix entry(j, k) = sum_i w_i z_i^j conj(z_i)^k, j, k in [0, order - 1]

    Properties:
    ===========
    entries: complex ndarray (order, order), read-only.  For the extended backend these are the
        mpmath values rounded to double

    factor: lower triangular Cholesky factor L with entries = L L^*.  complex ndarray, or an object
        ndarray of mpmath.mpc when precision == 'extended'

    pivots: ndarray of the Cholesky pivots L_kk^2

    condition_estimate: float, max(pivots) / min(pivots)
    """
    def __init__(self, entries, factor, pivots, precision='double', digits=None, exact_entries=None):
        self.entries = np.array(entries, dtype=complex)
        self.entries.setflags(write=False)
        self.factor = factor
        self.pivots = np.array(pivots, dtype=float)
        self.precision = precision
        self.digits = digits
        self.exact_entries = exact_entries

    @property
    def order(self):
        return self.entries.shape[0]

    @property
    def condition_estimate(self):
        return float(self.pivots.max() / self.pivots.min())

    def __repr__(self):
        return "MomentMatrix(order={}, precision={}, condition~{:.3e})".format(self.order, self.precision,
                                                                              self.condition_estimate)


def _fsum_complex(values):
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _double_entries(measure, order):
    # Column j of the Vandermonde matrix does not depend on the order, so moment_matrix(m) is
    # bitwise the leading block of moment_matrix(m + 1)
    V = np.vander(measure.nodes, order, increasing=True)
    W = measure.weights[:, None] * V
    Vc = np.conj(V)
    entries = np.zeros((order, order), dtype=complex)
    for j in range(order):
        entries[j, j] = math.fsum((W[:, j] * Vc[:, j]).real)
        for k in range(j + 1, order):
            entries[j, k] = _fsum_complex(W[:, j] * Vc[:, k])
            entries[k, j] = entries[j, k].conjugate()
    return entries


def _extended_entries(measure, order):
    """
    Moments in the current mpmath precision.  Nodes and weights are the double values, promoted exactly
    """
    nodes = [mpmath.mpc(complex(z)) for z in measure.nodes]
    weights = [mpmath.mpf(float(w)) for w in measure.weights]
    powers = []
    for z in nodes:
        row = [mpmath.mpc(1)]
        for _ in range(order - 1):
            row.append(row[-1] * z)
        powers.append(row)
    entries = np.empty((order, order), dtype=object)
    for j in range(order):
        for k in range(j, order):
            value = mpmath.fsum(w * p[j] * mpmath.conj(p[k]) for w, p in zip(weights, powers))
            if j == k:
                value = mpmath.mpc(value.real, 0)
            entries[j, k] = value
            entries[k, j] = mpmath.conj(value)
    return entries


def _cholesky_extended(entries, tolerance):
    """
    Column Cholesky on an object array of mpmath numbers.  Returns (L, pivots) or raises at the first
    pivot below tolerance
    """
    m = entries.shape[0]
    L = np.empty((m, m), dtype=object)
    L[:, :] = mpmath.mpc(0)
    pivots = []
    for j in range(m):
        pivot = (entries[j, j] - mpmath.fsum(L[j, k] * mpmath.conj(L[j, k]) for k in range(j))).real
        if pivot <= tolerance:
            condition = (max(pivots) / min(pivots)) if pivots else float('inf')
            raise PositiveDefinitenessError(j + 1, float(condition))
        pivots.append(pivot)
        L[j, j] = mpmath.mpc(mpmath.sqrt(pivot))
        for i in range(j + 1, m):
            s = entries[i, j] - mpmath.fsum(L[i, k] * mpmath.conj(L[j, k]) for k in range(j))
            L[i, j] = s / L[j, j]
    return L, pivots


def _cholesky_double(entries, tolerance):
    factor, info = lapack.zpotrf(entries, lower=1, clean=1)
    if info > 0:
        # LAPACK reports the order of the leading minor that is not positive definite
        pivots = np.abs(np.diag(factor)[:info - 1]) ** 2
        condition = float(pivots.max() / pivots.min()) if pivots.size else float('inf')
        raise PositiveDefinitenessError(int(info), condition)
    if info < 0:
        raise ValueError("Illegal argument {} to zpotrf".format(-info))
    pivots = np.abs(np.diag(factor)) ** 2
    low = np.nonzero(pivots <= tolerance)[0]
    if low.size:
        p = int(low[0])
        condition = float(pivots[:p].max() / pivots[:p].min()) if p else float('inf')
        raise PositiveDefinitenessError(p + 1, condition)
    return factor, pivots


def moment_matrix(measure, order, precision='double', digits=None):
    """
    Builds the moment matrix of the monomials 1, z, ..., z^(order - 1) and factors it.

    Arguments:
    ==========
    measure: DiscretizedMeasure

    order: int >= 1

    precision: 'double' or 'extended'
        extended computes the entries and the Cholesky factor in mpmath with `digits` decimal digits

    digits: int, only used with precision == 'extended'
    """
    order = int(order)
    if order < 1:
        raise ValueError("order must be at least 1, got {}".format(order))
    if len(measure) < order:
        raise ValueError("measure has {} nodes, fewer than the order {}".format(len(measure), order))
    start_time = time.time()

    if precision == 'double':
        entries = _double_entries(measure, order)
        tolerance = PIVOT_TOLERANCE * entries[0, 0].real
        factor, pivots = _cholesky_double(entries, tolerance)
        res = MomentMatrix(entries, factor, pivots, 'double')
    elif precision == 'extended':
        digits = int(digits or DEFAULT_DIGITS)
        if digits < MIN_EXTENDED_DIGITS:
            raise ValueError("extended precision needs at least {} digits, got {}".format(MIN_EXTENDED_DIGITS,
                                                                                         digits))
        with mpmath.workdps(digits):
            exact = _extended_entries(measure, order)
            # Same relative threshold, scaled down with the working precision
            tolerance = exact[0, 0].real * mpmath.mpf(10) ** (3 - digits)
            factor, pivots = _cholesky_extended(exact, tolerance)
            entries = np.array([[complex(v) for v in row] for row in exact], dtype=complex)
            pivots = [float(p) for p in pivots]
        res = MomentMatrix(entries, factor, pivots, 'extended', digits, exact)
    else:
        raise ValueError("Unknown precision mode: {}".format(precision))

    logger.info("Moment matrix of order {} ({}) built in {:.3f}s, condition estimate {:.3e}".format(
        order, precision, time.time() - start_time, res.condition_estimate))
    return res


def inner_product(measure, Q, R):
    """
    <Q, R>_mu = sum_i w_i Q(z_i) conj(R(z_i)).  Q and R are monomial coefficients, lowest degree first
    """
    Q = np.atleast_1d(np.asarray(Q, dtype=complex))
    R = np.atleast_1d(np.asarray(R, dtype=complex))
    if Q.size == 0 or R.size == 0:
        raise ValueError("Coefficient sequences must be nonempty")
    values = measure.weights * P.polyval(measure.nodes, Q) * np.conj(P.polyval(measure.nodes, R))
    res = _fsum_complex(values)
    if not np.isfinite(res):
        raise NonFiniteError("Inner product is not finite: {}".format(res))
    return res
