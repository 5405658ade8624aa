"""
Laurent maps c_1 z + c_0 + c_{-1}/z + ..., the column approximants h_n of a Hessenberg section,
closed-form exterior Riemann maps and the samplers used to compare them
"""
import math
import time

import numpy as np
from joblib import Parallel, delayed
from scipy.special import binom

from classes import logger, chunks, NonFiniteError
from constants import DEFAULT_SAMPLES, MIN_SUP_SAMPLES, MAX_SERIES_DEPTH, REFERENCE_KINDS


class LaurentMap(object):
    """
    Finite Laurent series c1 z + sum_k cneg[k] z^{-k}, meant for |z| >= 1
    """
    def __init__(self, c1, cneg, label=None):
        self.c1 = complex(c1)
        self.cneg = np.atleast_1d(np.array(cneg, dtype=complex))
        self.cneg.setflags(write=False)
        self.label = label or 'laurent'

    @property
    def depth(self):
        return self.cneg.shape[0] - 1

    def evaluate(self, z, full_output=False):
        """
        Horner evaluation in 1/z.  Points with |z| < 1 are evaluated but reported in the mask
        returned with full_output=True
        """
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise ValueError("Laurent map {} cannot be evaluated at z = 0".format(self.label))
        w = 1 / z
        acc = np.full(z.shape, self.cneg[-1], dtype=complex)
        for c in self.cneg[-2::-1]:
            acc = acc * w + c
        res = self.c1 * z + acc
        if not np.all(np.isfinite(res)):
            raise NonFiniteError("Non-finite value of {}".format(self.label))
        inside = np.abs(z) < 1
        if np.any(inside):
            logger.debug("{} evaluated at {} points inside the unit disk".format(self.label, int(inside.sum())))
        if full_output:
            return res, inside
        return res

    def modulus(self):
        """
        |c1| + sum_k k |c_{-k}|, a Lipschitz constant of the map on the unit circle
        """
        k = np.arange(self.cneg.shape[0])
        return abs(self.c1) + math.fsum(k * np.abs(self.cneg))

    def __repr__(self):
        return "LaurentMap({}, c1={}, depth={})".format(self.label, self.c1, self.depth)


def _arc_coefficients(a, m):
    rho = math.sqrt(a * a - 1) / a
    return rho, -rho ** np.arange(m + 1) / a ** 2


def _cross_coefficients(a, b, m):
    """
    phi(z) = C z sqrt(1 - u/u1) sqrt(1 - u/u2), u = z^-2, with u1, u2 the roots of 1 + 2 kappa u + u^2.
    Product of the two binomial series in u; the odd coefficient c_{-(2k-1)} is C e_k
    """
    C = math.sqrt(a * a + b * b) / 2
    kappa = (a * a - b * b) / (a * a + b * b)
    root = math.sqrt(max(0.0, 1 - kappa * kappa))
    u1 = complex(-kappa, root)
    u2 = complex(-kappa, -root)
    K = m // 2 + 1
    k = np.arange(K + 1)
    # Powers by repeated multiplication keep the exact zero pattern when u1, u2 = +-i
    p1 = np.concatenate(([1.0 + 0j], np.cumprod(np.full(K, -1 / u1))))
    p2 = np.concatenate(([1.0 + 0j], np.cumprod(np.full(K, -1 / u2))))
    s1 = binom(0.5, k) * p1
    s2 = binom(0.5, k) * p2
    e = np.convolve(s1, s2)[:K + 1]
    cneg = np.zeros(m + 1, dtype=complex)
    for j in range(1, K + 1):
        if 2 * j - 1 <= m:
            cneg[2 * j - 1] = C * e[j].real
    return C, cneg


class ReferenceMap(object):
    """
    Closed-form exterior Riemann maps

        arc(a):          z (a - s z) / (s - a z), s = sqrt(a^2 - 1); arc of the unit circle
        cross(a, b):     sqrt(a^2 (z^2 + 1)^2 + b^2 (z^2 - 1)^2) / (2 z); [-a, a] U [-ib, ib]
        joukowski(a, b): (a + b)/2 + (b - a)/4 (z + 1/z); interval [a, b]
        identity_circle: z; unit circle
    """
    def __init__(self, kind, **params):
        if kind not in REFERENCE_KINDS:
            raise ValueError("Unknown reference map: {}".format(kind))
        self.kind = kind
        self.params = {k: float(v) for k, v in params.items()}
        if kind == 'arc':
            if not self.params['a'] > 1:
                raise ValueError("arc reference requires a > 1")
        elif kind == 'cross':
            if not (self.params['a'] > 0 and self.params['b'] > 0):
                raise ValueError("cross reference requires a, b > 0")
        elif kind == 'joukowski':
            if not self.params['a'] < self.params['b']:
                raise ValueError("joukowski reference requires a < b")

    @property
    def label(self):
        if not self.params:
            return self.kind
        return "{}({})".format(self.kind, ', '.join('{}={}'.format(k, self.params[k]) for k in sorted(self.params)))

    @property
    def capacity(self):
        p = self.params
        if self.kind == 'arc':
            return math.sqrt(p['a'] ** 2 - 1) / p['a']
        if self.kind == 'cross':
            return math.sqrt(p['a'] ** 2 + p['b'] ** 2) / 2
        if self.kind == 'joukowski':
            return (p['b'] - p['a']) / 4
        return 1.0

    def evaluate(self, z, full_output=False):
        z = np.asarray(z, dtype=complex)
        if np.any(z == 0):
            raise ValueError("Reference map {} cannot be evaluated at z = 0".format(self.label))
        p = self.params
        if self.kind == 'arc':
            a = p['a']
            s = math.sqrt(a * a - 1)
            res = z * (a - s * z) / (s - a * z)
        elif self.kind == 'cross':
            a, b = p['a'], p['b']
            C = math.sqrt(a * a + b * b) / 2
            kappa = (a * a - b * b) / (a * a + b * b)
            root = math.sqrt(max(0.0, 1 - kappa * kappa))
            u = z ** -2
            # Principal roots of factors with nonnegative real part: continuous for |z| >= 1
            res = C * z * np.sqrt(1 - u / complex(-kappa, root)) * np.sqrt(1 - u / complex(-kappa, -root))
        elif self.kind == 'joukowski':
            a, b = p['a'], p['b']
            res = (a + b) / 2 + (b - a) / 4 * (z + 1 / z)
        else:
            res = z.copy()
        if full_output:
            return res, np.abs(z) < 1
        return res

    def laurent(self, truncation):
        return reference_laurent(self, truncation)

    def __repr__(self):
        return "ReferenceMap({})".format(self.label)


def reference_laurent(ref, truncation):
    """
    Laurent coefficients c1, c_0, ..., c_{-truncation} of a reference map
    """
    m = int(truncation)
    if m < 1:
        raise ValueError("truncation must be at least 1, got {}".format(m))
    p = ref.params
    if ref.kind == 'arc':
        c1, cneg = _arc_coefficients(p['a'], m)
    elif ref.kind == 'cross':
        if m > MAX_SERIES_DEPTH:
            raise ValueError("cross series expansion is limited to depth {}, got {}".format(MAX_SERIES_DEPTH, m))
        c1, cneg = _cross_coefficients(p['a'], p['b'], m)
    elif ref.kind == 'joukowski':
        c1 = (p['b'] - p['a']) / 4
        cneg = np.zeros(m + 1)
        cneg[0] = (p['a'] + p['b']) / 2
        cneg[1] = c1
    else:
        c1 = 1.0
        cneg = np.zeros(m + 1)
    return LaurentMap(c1, cneg, label='{}[{}]'.format(ref.label, m))


def reference_for_curve(kind, params):
    """
    The closed-form map of a curve, when one is known.  Returns None otherwise
    """
    if kind == 'arc_circle':
        return ReferenceMap('arc', a=params['a'])
    if kind == 'cross':
        return ReferenceMap('cross', a=params['a'], b=params['b'])
    if kind == 'interval':
        return ReferenceMap('joukowski', a=params['a'], b=params['b'])
    if kind == 'circle':
        return ReferenceMap('identity_circle')
    return None


def approximant(section, n):
    """
    h_n(z) = d_{n+1,n} z + d_{n,n} + d_{n-1,n}/z + ... + d_{1,n}/z^{n-1}
    """
    n = int(n)
    if not 1 <= n <= section.size - 1:
        raise ValueError("approximant index must satisfy 1 <= n <= {}, got {}".format(section.size - 1, n))
    column = section.entries[:n + 1, n - 1]
    return LaurentMap(column[n].real, column[n - 1::-1], label='h_{}'.format(n))


def evaluate(mapping, z):
    return mapping.evaluate(z)


class CapacityEstimate(object):
    def __init__(self, value, trace, method):
        self.value = float(value)
        self.trace = np.asarray(trace, dtype=float)
        self.method = method

    def __repr__(self):
        return "CapacityEstimate({}, {})".format(self.value, self.method)


def capacity_estimate(section, window):
    """
    Mean of the last `window` subdiagonal entries d_{j+1,j}, which tend to the capacity of the support
    """
    window = int(window)
    if not 1 <= window < section.size:
        raise ValueError("window must satisfy 1 <= window < {}, got {}".format(section.size, window))
    trace = section.subdiagonal()[-window:]
    value = trace.mean()
    logger.info("Capacity estimate from {} subdiagonal entries of a {} section: {:.10f}".format(
        window, section.source, value))
    return CapacityEstimate(value, trace, 'mean of last {} subdiagonal entries'.format(window))


def boundary_image(mapping, samples=DEFAULT_SAMPLES, radius=1.0):
    """
    Evaluates the map at radius * exp(i theta_j), theta_j = 2 pi j / samples.
    Returns (theta, values)
    """
    samples = int(samples)
    if samples < 2:
        raise ValueError("samples must be at least 2, got {}".format(samples))
    if radius < 1:
        raise ValueError("radius must be at least 1, got {}".format(radius))
    theta = 2 * np.pi * np.arange(samples) / samples
    return theta, mapping.evaluate(radius * np.exp(1j * theta))


def _grid_chunk(mapping, radii, samples):
    return [(r,) + boundary_image(mapping, samples, r) for r in radii]


def equipotential_grid(mapping, radii, samples=DEFAULT_SAMPLES, n_jobs=1):
    """
    Images of the circles |z| = r, in the order of radii.  Returns a list of (r, theta, values)
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError("equipotential_grid needs at least one radius")
    if min(radii) <= 1:
        raise ValueError("Equipotential radii must all be > 1, got {}".format(min(radii)))
    start_time = time.time()
    if n_jobs == 1:
        res = _grid_chunk(mapping, radii, samples)
    else:
        parts = Parallel(n_jobs=n_jobs)(delayed(_grid_chunk)(mapping, c, samples)
                                        for c in chunks(radii, n_jobs))
        res = [curve for part in parts for curve in part]
    logger.info("Equipotential grid of {} curves for {} in {:.3f}s".format(len(res), mapping.label,
                                                                           time.time() - start_time))
    return res


def error_bound(radius, theta2, theta1, reference, n, truncation=None):
    """
    Analytic bound on |h_n - phi| on the circle of the given radius, from the column norms of D - T:

        r > 1:  Theta_n sqrt(r^2 + r^2/(r^2 - 1)) + ||phi~||_2 r / sqrt(r^2 - 1) / r^n
        r = 1:  theta_n + sum_{k >= n} |c_{-k}|

    The first factor is the l2 norm of (r, 1, 1/r, 1/r^2, ...).  phi~ is the part c_0 + c_{-1}/z + ... of the
    reference map, summed up to `truncation`, so at r = 1 the bound misses the l1 tail beyond it
    """
    truncation = truncation or max(4 * n, 1024)
    coefficients = np.abs(reference_laurent(reference, truncation).cneg)
    r = float(radius)
    if r > 1:
        norm = math.sqrt(math.fsum(coefficients ** 2))
        return theta2 * r * math.sqrt(1 + 1 / (r * r - 1)) + norm * r / math.sqrt(r * r - 1) / r ** n
    return theta1 + math.fsum(coefficients[n:])


def sup_difference(map_a, map_b, radius=1.0, samples=DEFAULT_SAMPLES, full_output=False, column=None):
    """
    Sampled maximum of |A - B| on the circle of the given radius.

    Arguments:
    ----------
    map_a, map_b: LaurentMap or ReferenceMap

    column: optional (n, Theta_n, theta_n).  When map_b is a ReferenceMap the analytic bound is added to the info

    With full_output=True returns (value, info) where info holds the maximizing angle, the modulus proxy
    sum k |c_{-k}| of the Laurent maps and the bound, if any
    """
    samples = int(samples)
    if samples < MIN_SUP_SAMPLES:
        raise ValueError("sup_difference needs at least {} samples, got {}".format(MIN_SUP_SAMPLES, samples))
    theta, va = boundary_image(map_a, samples, radius)
    _, vb = boundary_image(map_b, samples, radius)
    diff = np.abs(va - vb)
    i = int(np.argmax(diff))
    value = float(diff[i])
    if not full_output:
        return value
    info = {'theta': float(theta[i]),
            'modulus': max([m.modulus() for m in (map_a, map_b) if isinstance(m, LaurentMap)] or [0.0]),
            'bound': None}
    if column is not None and isinstance(map_b, ReferenceMap):
        n, theta2, theta1 = column
        info['bound'] = error_bound(radius, theta2, theta1, map_b, n)
    return value, info
