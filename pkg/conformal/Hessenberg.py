"""
Finite sections of the Hessenberg matrix D of the multiplication by z operator in the orthonormal polynomial basis,

    z P_n(z) = sum_{k=0}^{n+1} d_{k+1,n+1} P_k(z)

built by Arnoldi on a discretized measure, by Cholesky of the moment matrix, or from closed forms.
"""
import math
import time

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P
from scipy.linalg import solve_triangular

from classes import logger, ArnoldiBreakdown
from constants import BREAKDOWN_TOLERANCE


class OrthonormalBasis(object):
    """
    Monomial coefficients of P_0, ..., P_{degree}

    Properties:
    ===========
    coeffs: complex ndarray (degree + 1, degree + 1), lower triangular.  Row k holds the coefficients of P_k,
        lowest degree first

    leading: float ndarray, gamma_k = leading coefficient of P_k (> 0)
    """
    def __init__(self, coeffs):
        self.coeffs = np.array(coeffs, dtype=complex)
        self.coeffs.setflags(write=False)
        self.leading = np.real(np.diag(self.coeffs)).copy()

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    def evaluate(self, z):
        """
        Returns the (len(z), degree + 1) array of P_k(z_i)
        """
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        return np.vander(z, self.degree + 1, increasing=True).dot(self.coeffs.T)

    def monic(self, k):
        """
        Psi_k = P_k / gamma_k as monomial coefficients (length k + 1)
        """
        return np.array(self.coeffs[k, :k + 1]) / self.leading[k]


class HessenbergSection(object):
    """
    n x n upper Hessenberg section of D.  Storage is 0-based, the accessor d(i, j) is 1-based like d_{i,j}.

    source is one of 'arnoldi', 'moments', 'closed_form_arc', 'jacobi', 'shift'; params holds the generator
    parameters (a for the arc, (a, b, mode) for Jacobi).  Sections built from a measure carry either the
    weighted node values sqrt(w_i) P_k(z_i) (Arnoldi) or the basis coefficients (moments).
    """
    def __init__(self, entries, source, params=None, node_values=None, basis=None):
        self.entries = np.array(entries, dtype=complex)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("A Hessenberg section must be square, got shape {}".format(self.entries.shape))
        self.entries.setflags(write=False)
        self.source = source
        self.params = dict(params or {})
        self.node_values = node_values
        self.basis = basis

    @property
    def size(self):
        return self.entries.shape[0]

    def d(self, i, j):
        if not (1 <= i <= self.size and 1 <= j <= self.size):
            raise IndexError("d_{{{},{}}} is outside a section of size {}".format(i, j, self.size))
        return self.entries[i - 1, j - 1]

    def subdiagonal(self):
        """
        d_{j+1,j} for j = 1..size-1, as reals
        """
        return np.real(np.diag(self.entries, -1)).copy()

    def column(self, j):
        """
        (d_{1,j}, ..., d_{j+1,j}), the nonzero part of column j (1-based, j <= size - 1)
        """
        if not 1 <= j <= self.size - 1:
            raise IndexError("Column {} has no subdiagonal entry in a section of size {}".format(j, self.size))
        return self.entries[:j + 1, j - 1].copy()

    def to_triples(self):
        """
        1-based (i, j, re, im) for every entry on or above the first subdiagonal
        """
        rows = []
        for j in range(1, self.size + 1):
            for i in range(1, min(j + 1, self.size) + 1):
                value = self.entries[i - 1, j - 1]
                rows.append((i, j, value.real, value.imag))
        return rows

    def __repr__(self):
        return "HessenbergSection(size={}, source={})".format(self.size, self.source)


def hessenberg_arnoldi(measure, n):
    """
    Arnoldi iteration for the diagonal operator v -> (z_i v_i)_i started from (sqrt(w_i))_i, with full
    orthogonalization and one reorthogonalization pass.  Column j of V holds sqrt(w_i) P_j(z_i).

    Raises ArnoldiBreakdown when the residual falls below BREAKDOWN_TOLERANCE times the starting norm
    """
    n = int(n)
    N = len(measure)
    if n < 1:
        raise ValueError("Section size must be at least 1, got {}".format(n))
    if n + 1 > N:
        raise ValueError("Arnoldi for n={} needs at least {} nodes, the measure has {}".format(n, n + 1, N))
    if np.any(measure.weights <= 0):
        raise ValueError("Arnoldi needs positive weights")

    start_time = time.time()
    z = measure.nodes
    V = np.zeros((N, n + 1), dtype=complex)
    H = np.zeros((n + 1, n), dtype=complex)
    v0 = np.sqrt(measure.weights).astype(complex)
    norm0 = np.linalg.norm(v0)
    V[:, 0] = v0 / norm0

    for j in range(n):
        u = z * V[:, j]
        basis = V[:, :j + 1]
        h = basis.conj().T.dot(u)
        u = u - basis.dot(h)
        # Reorthogonalize once
        h2 = basis.conj().T.dot(u)
        u = u - basis.dot(h2)
        h = h + h2
        beta = np.linalg.norm(u)
        if beta < BREAKDOWN_TOLERANCE * norm0:
            raise ArnoldiBreakdown(j + 1, beta)
        H[:j + 1, j] = h
        H[j + 1, j] = beta
        V[:, j + 1] = u / beta
        if (j + 1) % 25 == 0:
            logger.debug("Arnoldi step {} of {}, residual {:.3e}".format(j + 1, n, beta))

    logger.info("Finished Arnoldi for n={} on {} nodes in {:.3f}s".format(n, N, time.time() - start_time))
    V.setflags(write=False)
    return HessenbergSection(H[:n, :n], 'arnoldi', {'nodes': N}, node_values=V)


def _inverse_lower_extended(L):
    """
    Inverse of a lower triangular object array of mpmath numbers by forward substitution
    """
    m = L.shape[0]
    C = np.empty((m, m), dtype=object)
    C[:, :] = mpmath.mpc(0)
    for j in range(m):
        C[j, j] = 1 / L[j, j]
        for i in range(j + 1, m):
            C[i, j] = -mpmath.fsum(L[i, k] * C[k, j] for k in range(j, i)) / L[i, i]
    return C


def hessenberg_from_moments(M, n):
    """
    With M = L L^* the rows of C = L^{-1} are the coefficients of the orthonormal polynomials, and

        d_{k+1,m+1} = <z P_m, P_k> = (C M' C^*)_{m,k},   M'_{j,l} = <z^{j+1}, z^l> = entry(j + 1, l)

    Needs M.order >= n + 1.  Extended-precision moment matrices are processed in their own precision
    """
    n = int(n)
    if n < 1:
        raise ValueError("Section size must be at least 1, got {}".format(n))
    if M.order < n + 1:
        raise ValueError("A section of size {} needs a moment matrix of order {}, got {}".format(n, n + 1, M.order))
    start_time = time.time()

    if M.precision == 'extended':
        with mpmath.workdps(M.digits):
            L = M.factor[:n, :n]
            C = _inverse_lower_extended(L)
            shifted = M.exact_entries[1:n + 1, :n]
            CH = np.array([[mpmath.conj(v) for v in row] for row in C.T], dtype=object)
            product = C.dot(shifted).dot(CH)
            entries = np.array([[complex(v) for v in row] for row in product.T], dtype=complex)
            coeffs = np.array([[complex(v) for v in row] for row in C], dtype=complex)
    else:
        L = M.factor[:n, :n]
        shifted = M.entries[1:n + 1, :n]
        X = solve_triangular(L, shifted, lower=True)
        Y = solve_triangular(L, X.conj().T, lower=True).conj().T
        entries = Y.T
        coeffs = solve_triangular(L, np.eye(n, dtype=complex), lower=True)

    logger.info("Hessenberg section of size {} from moments ({}) in {:.3f}s".format(n, M.precision,
                                                                                    time.time() - start_time))
    return HessenbergSection(np.triu(entries, -1), 'moments', {'precision': M.precision},
                             basis=OrthonormalBasis(coeffs))


def closed_form_arc_hessenberg(a, n):
    """
    Unitary Hessenberg matrix of the measure on an arc of the unit circle whose monic orthogonal polynomials
    have Psi_n(0) = 1/a for n >= 1.  With s = sqrt(a^2 - 1) and rho = s / a:

        d_{1,k} = -rho^(k-1) / a,   d_{j+1,j} = rho,   d_{j,k} = -rho^(k-j) / a^2  (2 <= j <= k)
    """
    a = float(a)
    n = int(n)
    if not a > 1:
        raise ValueError("closed_form_arc_hessenberg requires a > 1, got a={}".format(a))
    if n < 1:
        raise ValueError("Section size must be at least 1, got {}".format(n))
    rho = math.sqrt(a * a - 1) / a
    powers = rho ** np.arange(n)
    D = np.zeros((n, n), dtype=complex)
    for k in range(n):
        D[0, k] = -powers[k] / a
        D[1:k + 1, k] = -powers[:k][::-1] / a ** 2
        if k + 1 < n:
            D[k + 1, k] = rho
    return HessenbergSection(D, 'closed_form_arc', {'a': a})


def jacobi_interval(a, b, n, mode='limit'):
    """
    Symmetric tridiagonal section for the interval [a, b]

    mode:
        'limit': the limit Jacobi matrix, off-diagonal (b - a)/4 and diagonal (a + b)/2
        'legendre': uniform measure on [a, b], off-diagonal ((b - a)/2) k / sqrt(4k^2 - 1)
    """
    a = float(a)
    b = float(b)
    n = int(n)
    if not a < b:
        raise ValueError("jacobi_interval requires a < b, got a={}, b={}".format(a, b))
    if n < 1:
        raise ValueError("Section size must be at least 1, got {}".format(n))
    k = np.arange(1, n, dtype=float)
    if mode == 'limit':
        off = np.full(n - 1, (b - a) / 4)
    elif mode == 'legendre':
        off = ((b - a) / 2) * k / np.sqrt(4 * k ** 2 - 1)
    else:
        raise ValueError("Unknown Jacobi mode: {}".format(mode))
    D = np.diag(np.full(n, (a + b) / 2)) + np.diag(off, -1) + np.diag(off, 1)
    return HessenbergSection(D.astype(complex), 'jacobi', {'a': a, 'b': b, 'mode': mode})


def circle_shift(n):
    """
    Section of the forward shift, the Hessenberg matrix of the uniform measure on the unit circle
    """
    n = int(n)
    if n < 1:
        raise ValueError("Section size must be at least 1, got {}".format(n))
    return HessenbergSection(np.eye(n, k=-1, dtype=complex), 'shift')


def orthonormal_basis(section):
    """
    Runs the recurrence forward, P_j = (z P_{j-1} - sum_{k<j} d_{k+1,j} P_k) / d_{j+1,j},
    returning the basis P_0..P_{size-1}
    """
    n = section.size
    coeffs = np.zeros((n, n), dtype=complex)
    coeffs[0, 0] = 1
    D = section.entries
    for j in range(1, n):
        p = np.zeros(n, dtype=complex)
        p[1:] = coeffs[j - 1, :-1]
        p = p - coeffs[:j].T.dot(D[:j, j - 1])
        coeffs[j] = p / D[j, j - 1]
    return OrthonormalBasis(coeffs)


def characteristic_polynomial(section, m=None):
    """
    Monic characteristic polynomial of the leading m x m block (default: the whole section) by Hyman's
    recurrence for Hessenberg determinants:

        p_k = (z - d_{k,k}) p_{k-1} - sum_{i<k} d_{i,k} (prod_{l=i+1}^{k} d_{l,l-1}) p_{i-1}

    Coefficients lowest degree first
    """
    m = section.size if m is None else int(m)
    D = section.entries
    polys = [np.array([1.0 + 0j])]
    for k in range(1, m + 1):
        p = P.polysub(P.polymulx(polys[k - 1]), D[k - 1, k - 1] * polys[k - 1])
        product = 1.0 + 0j
        for i in range(k - 1, 0, -1):
            product *= D[i, i - 1]
            p = P.polysub(p, D[i - 1, k - 1] * product * polys[i - 1])
        polys.append(np.array(p, dtype=complex))
    return polys[m]


def verify_recurrence(section, measure):
    """
    Maximum over columns j = 1..size-1 of the weighted l2 residual

        sqrt(sum_i w_i |z_i P_{j-1}(z_i) - sum_{k=0}^{j} d_{k+1,j} P_k(z_i)|^2)

    P_k(z_i) come from the section's own basis when it has one, otherwise from a fresh Arnoldi run on the measure
    """
    n = section.size
    if section.node_values is not None:
        V = section.node_values
        if V.shape[0] != len(measure):
            raise ValueError("Section was built on {} nodes, the measure has {}".format(V.shape[0], len(measure)))
    elif section.basis is not None:
        V = np.sqrt(measure.weights)[:, None] * section.basis.evaluate(measure.nodes)
    else:
        V = hessenberg_arnoldi(measure, n).node_values
    if V.shape[1] < n:
        raise ValueError("Size mismatch: section of size {} but only {} basis vectors".format(n, V.shape[1]))

    z = measure.nodes
    D = section.entries
    worst = 0.0
    for j in range(1, n):
        residual = z * V[:, j - 1] - V[:, :j + 1].dot(D[:j + 1, j - 1])
        worst = max(worst, float(np.linalg.norm(residual)))
    logger.debug("Recurrence residual for {} of size {}: {:.3e}".format(section.source, n, worst))
    return worst
