"""
Limit Toeplitz matrix T of a Hessenberg section, the column norms of D - T and the symbol of T
"""
import math

import numpy as np

from classes import logger
from conformal.Riemann import LaurentMap, reference_laurent


class DiagonalLimits(object):
    """
    Diagonals of T: d1 on the subdiagonal, dneg = (d_0, d_{-1}, ..., d_{-m}) on and above the diagonal.

    provenance is 'analytic' (from a reference map) or 'estimated' (tail means of a section).  Estimated limits
    also carry the window and the per-diagonal spread (max - min over the window, real and imaginary parts
    combined in modulus)
    """
    def __init__(self, d1, dneg, provenance, window=None, spread=None, source=None):
        d1 = complex(d1)
        if abs(d1.imag) > 1e-12 * max(1.0, abs(d1.real)) or not d1.real > 0:
            raise ValueError("Subdiagonal limit must be real and positive, got {}".format(d1))
        self.d1 = d1.real
        self.dneg = np.array(dneg, dtype=complex)
        self.dneg.setflags(write=False)
        self.provenance = provenance
        self.window = window
        self.spread = spread
        self.source = source

    def __len__(self):
        return self.dneg.shape[0]

    def __repr__(self):
        return "DiagonalLimits(d1={}, {} diagonals, {})".format(self.d1, len(self), self.provenance)


class ToeplitzDiagnostics(object):
    """
    Column norms of D - T for columns n = 1..N

    Properties:
    ===========
    theta2: l2 norms Theta_n

    theta1: l1 norms theta_n

    tail_l2: sqrt(sum_{k >= n} |d_{-k}|^2), the part of the symbol no column of length n can match

    row_l1: partial sums of |d_{-k}|
    """
    def __init__(self, theta2, theta1, tail_l2, row_l1, provenance):
        self.theta2 = np.asarray(theta2, dtype=float)
        self.theta1 = np.asarray(theta1, dtype=float)
        self.tail_l2 = np.asarray(tail_l2, dtype=float)
        self.row_l1 = np.asarray(row_l1, dtype=float)
        self.provenance = provenance

    @property
    def columns(self):
        return np.arange(1, self.theta2.shape[0] + 1)

    def Theta(self, n):
        return float(self.theta2[n - 1])

    def theta(self, n):
        return float(self.theta1[n - 1])

    def to_rows(self):
        return [(n, t2, t1, tail) for n, t2, t1, tail in zip(self.columns, self.theta2, self.theta1, self.tail_l2)]


def tail_l2(limits, n):
    """
    sqrt(sum_{k >= n} |d_{-k}|^2) over the available diagonals
    """
    return math.sqrt(math.fsum(np.abs(limits.dneg[n:]) ** 2))


def theta_norms(section, limits):
    """
    For every column n = 1..size-1 compares (d_{n+1,n}, d_{n,n}, ..., d_{1,n}) against (d_1, d_0, ..., d_{-(n-1)})

        Theta_n = sqrt(sum_{k=-1}^{n-1} |d_{-k} - d_{n-k,n}|^2),   theta_n = sum_{k=-1}^{n-1} |d_{-k} - d_{n-k,n}|
    """
    N = section.size - 1
    if N < 1:
        raise ValueError("theta_norms needs a section of size at least 2")
    if len(limits) < N:
        raise ValueError("theta_norms needs {} diagonal limits for a section of size {}, got {}".format(
            N, section.size, len(limits)))
    D = section.entries
    theta2 = np.zeros(N)
    theta1 = np.zeros(N)
    tails = np.zeros(N)
    for n in range(1, N + 1):
        # Column n from the subdiagonal up: d_{n+1,n}, d_{n,n}, ..., d_{1,n}
        column = D[n::-1, n - 1]
        target = np.concatenate(([limits.d1], limits.dneg[:n]))
        diff = np.abs(column - target)
        theta2[n - 1] = math.sqrt(math.fsum(diff ** 2))
        theta1[n - 1] = math.fsum(diff)
        tails[n - 1] = tail_l2(limits, n)
    row_l1 = np.cumsum(np.abs(limits.dneg))
    logger.debug("Column norms of D - T for {} columns ({} limits)".format(N, limits.provenance))
    return ToeplitzDiagnostics(theta2, theta1, tails, row_l1, limits.provenance)


def default_window(size):
    return max(1, min(max(5, size // 8), (size - 1) // 2))


def estimate_diagonal_limits(section, window=None):
    """
    Tail means over the last `window` columns j that have their subdiagonal inside the section
    (j = size - window .. size - 1):

        d1 = mean d_{j+1,j},   d_{-k} = mean d_{j-k,j},  k = 0 .. size - window - 1
    """
    n = section.size
    window = default_window(n) if window is None else int(window)
    if window < 1 or not window < n / 2.0:
        raise ValueError("window must satisfy 1 <= window < size/2, got window={} for size {}".format(window, n))
    D = section.entries
    cols = np.arange(n - window, n)  # 1-based column numbers
    sub = np.real(D[cols, cols - 1])
    depth = n - window
    dneg = np.zeros(depth, dtype=complex)
    spread = np.zeros(depth + 1)
    spread[0] = sub.max() - sub.min()
    for k in range(depth):
        values = D[cols - 1 - k, cols - 1]
        dneg[k] = values.mean()
        spread[k + 1] = math.hypot(np.ptp(values.real), np.ptp(values.imag))
    limits = DiagonalLimits(sub.mean(), dneg, 'estimated', window=window, spread=spread, source=section.source)
    logger.info("Estimated diagonal limits from a section of size {} with window {}: d1={:.10f}, max spread {:.3e}"
                .format(n, window, limits.d1, spread.max()))
    return limits


def limits_from_reference(ref, m):
    """
    Analytic limits: the diagonals of T are the Laurent coefficients of the Riemann map
    """
    laurent = reference_laurent(ref, m)
    return DiagonalLimits(laurent.c1, laurent.cneg, 'analytic', source=ref.label)


def symbol_from_limits(limits, truncation=None):
    """
    f_T(z) = d_1 z + d_0 + d_{-1}/z + ... + d_{-truncation}/z^truncation
    """
    truncation = len(limits) - 1 if truncation is None else int(truncation)
    if truncation < 0 or truncation > len(limits) - 1:
        raise ValueError("truncation {} exceeds the {} available diagonals".format(truncation, len(limits)))
    return LaurentMap(limits.d1, limits.dneg[:truncation + 1], label='symbol({})'.format(limits.provenance))


def row_l1_bounded(limits, tail_fraction=0.5, tiny=1e-300):
    """
    Whether sum |d_{-k}| converges, judged on the nonzero coefficients in the last tail_fraction of the
    available diagonals.  The ratio test decides when the ratios stay below one without trending up,
    Raabe's test decides otherwise.

    Returns (bounded, test name)
    """
    a = np.abs(limits.dneg)
    positions = np.nonzero(a > tiny)[0]
    if positions.size < 4:
        return True, 'finite'
    a = a[positions]
    start = int(len(a) * (1 - tail_fraction))
    start = min(start, len(a) - 3)
    ratios = a[start + 1:] / a[start:-1]
    # Ratios still creeping up towards one leave the ratio test inconclusive
    if ratios.max() < 0.999 and ratios[-1] <= ratios[0] + 1e-9:
        return True, 'ratio'
    if ratios.min() > 1.001:
        return False, 'ratio'
    # Raabe: k (a_k / a_{k+1} - 1) > 1 eventually
    k = np.arange(start + 1, len(a))
    raabe = k * (a[start:-1] / a[start + 1:] - 1)
    return bool(raabe.min() > 1), 'raabe'
