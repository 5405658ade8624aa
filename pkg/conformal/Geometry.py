"""
Curves (finite unions of Jordan arcs) and the quadrature discretization of the uniform measure on them
"""
import math
import time
import warnings

import numpy as np
from scipy import integrate
from scipy.integrate import IntegrationWarning

from classes import logger, CurveError
from constants import QUADRATURE_RULE, ARC_LENGTH_RTOL, ARC_LENGTH_LIMIT, MIN_NODES_PER_SEGMENT


class Segment(object):
    """
    Smooth parametric piece t -> z(t), t in [t0, t1]

    Parameters
    ---------
    z: callable
        Vectorized map from real parameters to complex points

    dz: callable
        Vectorized derivative z'(t)

    t0, t1: float
        Parameter interval, t0 < t1
    """
    def __init__(self, z, dz, t0, t1):
        if not t1 > t0:
            raise CurveError("Segment parameter interval must satisfy t0 < t1, got [{}, {}]".format(t0, t1))
        self.z = z
        self.dz = dz
        self.t0 = float(t0)
        self.t1 = float(t1)

    def speed(self, t):
        return np.abs(self.dz(t))

    @property
    def endpoints(self):
        return complex(self.z(np.array([self.t0]))[0]), complex(self.z(np.array([self.t1]))[0])


class Curve(object):
    """
    A compact set given as a finite union of parametrized arcs.  Built by build_curve()

    kind and params record the descriptor the curve was built from, so that the pipeline can dispatch on it
    (arc_circle routes to the closed form matrix, never to quadrature)
    """
    def __init__(self, kind, params, segments):
        if not segments:
            raise CurveError("A curve needs at least one segment")
        self.kind = kind
        self.params = dict(params)
        self.segments = tuple(segments)

    @property
    def label(self):
        if not self.params:
            return self.kind
        return "{}({})".format(self.kind, ', '.join('{}={}'.format(k, self.params[k]) for k in sorted(self.params)))

    def sample(self, points_per_segment=200):
        """
        Points along every segment, for overlays
        """
        return [s.z(np.linspace(s.t0, s.t1, points_per_segment)) for s in self.segments]

    def __repr__(self):
        return "Curve({}, {} segments)".format(self.label, len(self.segments))


def _line(start, stop):
    start = complex(start)
    delta = complex(stop) - start
    return Segment(lambda t: start + delta * np.asarray(t, dtype=float),
                   lambda t: delta * np.ones_like(np.asarray(t, dtype=float)),
                   0.0, 1.0)


def _interval(a, b):
    a = float(a)
    b = float(b)
    if not a < b:
        raise CurveError("interval requires a < b, got a={}, b={}".format(a, b))
    return [Segment(lambda t: np.asarray(t, dtype=float) + 0j,
                    lambda t: np.ones_like(np.asarray(t, dtype=float)) + 0j,
                    a, b)]


def _cross(a, b):
    a = float(a)
    b = float(b)
    if a <= 0 or b <= 0:
        raise CurveError("cross requires positive arm half-lengths, got a={}, b={}".format(a, b))
    # Four arms leaving the origin: [0,a], [0,bi], [-a,0], [-bi,0]
    segments = []
    for direction, length in ((1, a), (1j, b), (-1, a), (-1j, b)):
        segments.append(Segment(lambda t, d=direction: d * np.asarray(t, dtype=float),
                                lambda t, d=direction: d * np.ones_like(np.asarray(t, dtype=float)),
                                0.0, length))
    return segments


def arc_circle_angle(a):
    """
    Half-opening of the gap of the arc of circle with parameter a: the arc is {e^{it}, t in [beta, 2 pi - beta]}.
    The endpoints are phi(z_c) = z_c^2 at the critical points z_c = (sqrt(a^2-1) +- i)/a of the Riemann map
    """
    return 2 * math.atan2(1.0, math.sqrt(a * a - 1))


def _arc_circle(a):
    a = float(a)
    if not a > 1:
        raise CurveError("arc_circle requires a > 1, got a={}".format(a))
    beta = arc_circle_angle(a)
    return [Segment(lambda t: np.exp(1j * np.asarray(t, dtype=float)),
                    lambda t: 1j * np.exp(1j * np.asarray(t, dtype=float)),
                    beta, 2 * math.pi - beta)]


def _circle(n_arcs=4):
    segments = []
    step = 2 * math.pi / n_arcs
    for k in range(n_arcs):
        segments.append(Segment(lambda t: np.exp(1j * np.asarray(t, dtype=float)),
                                lambda t: 1j * np.exp(1j * np.asarray(t, dtype=float)),
                                k * step, (k + 1) * step))
    return segments


def _drop_z(t):
    u = np.exp(1j * np.asarray(t, dtype=float))
    return u ** 2 / (1 + 2 * u)


def _drop_dz(t):
    u = np.exp(1j * np.asarray(t, dtype=float))
    return 1j * u * (2 * u + 2 * u ** 2) / (1 + 2 * u) ** 2


def _spiral_z(t):
    t = np.asarray(t, dtype=float)
    return t * np.exp(1j * t) / 6


def _spiral_dz(t):
    t = np.asarray(t, dtype=float)
    return np.exp(1j * t) * (1 + 1j * t) / 6


def _polyline(vertices):
    points = [complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in vertices]
    if len(points) < 2:
        raise CurveError("polyline requires at least two vertices")
    segments = []
    for start, stop in zip(points[:-1], points[1:]):
        if start == stop:
            raise CurveError("polyline has a repeated vertex {}".format(start))
        segments.append(_line(start, stop))
    return segments


def build_curve(spec):
    """
    Builds a Curve from a descriptor dict, e.g. {'kind': 'cross', 'a': 1, 'b': 1}

    Supported kinds:
        interval(a, b), cross(a, b), arc_circle(a), drop, spiral, polyline(vertices), circle
    """
    spec = dict(spec)
    kind = spec.pop('kind', None)
    try:
        if kind == 'interval':
            params = {'a': float(spec['a']), 'b': float(spec['b'])}
            segments = _interval(**params)
        elif kind == 'cross':
            params = {'a': float(spec.get('a', 1.0)), 'b': float(spec.get('b', 1.0))}
            segments = _cross(**params)
        elif kind == 'arc_circle':
            params = {'a': float(spec['a'])}
            segments = _arc_circle(**params)
        elif kind == 'drop':
            params = {}
            segments = [Segment(_drop_z, _drop_dz, 0.0, math.pi)]
        elif kind == 'spiral':
            params = {}
            segments = [Segment(_spiral_z, _spiral_dz, 0.0, 2 * math.pi)]
        elif kind == 'polyline':
            params = {'vertices': [list(v) if isinstance(v, (list, tuple)) else [complex(v).real, complex(v).imag]
                                   for v in spec['vertices']]}
            segments = _polyline(spec['vertices'])
        elif kind == 'circle':
            params = {}
            segments = _circle()
        else:
            raise CurveError("Unknown curve kind: {}".format(kind))
    except KeyError as e:
        raise CurveError("Curve of kind {} is missing parameter {}".format(kind, e))
    except (TypeError, ValueError) as e:
        raise CurveError("Invalid parameters for curve of kind {}: {}".format(kind, e))
    return Curve(kind, params, segments)


class DiscretizedMeasure(object):
    """
    Weighted nodes approximating the normalized arc-length measure on a curve.  Arrays are read-only.

    Properties:
    ===========
    nodes: complex ndarray of shape (n_nodes,)

    weights: positive float ndarray of shape (n_nodes,), summing to 1

    nodes_per_segment: tuple of ints

    rule: string, quadrature rule id
    """
    def __init__(self, nodes, weights, nodes_per_segment, rule=QUADRATURE_RULE, label=None):
        self.nodes = np.array(nodes, dtype=complex)
        self.weights = np.array(weights, dtype=float)
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)
        self.nodes_per_segment = tuple(nodes_per_segment)
        self.rule = rule
        self.label = label

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def total_mass(self):
        return math.fsum(self.weights)

    def moment(self, j, k=0):
        """
        sum_i w_i z_i^j conj(z_i)^k, compensated
        """
        vals = self.weights * self.nodes ** j * np.conj(self.nodes) ** k
        return complex(math.fsum(vals.real), math.fsum(vals.imag))


def discretize_measure(curve, nodes_per_segment=MIN_NODES_PER_SEGMENT):
    """
    Gauss-Legendre nodes mapped through every segment, weighted by |z'(t)| and normalized to a probability measure.
    Nodes are ordered segment by segment, with increasing parameter inside each segment
    """
    nodes_per_segment = int(nodes_per_segment)
    if nodes_per_segment < 2:
        raise ValueError("nodes_per_segment must be at least 2, got {}".format(nodes_per_segment))
    start_time = time.time()
    x, gl_weights = np.polynomial.legendre.leggauss(nodes_per_segment)

    nodes = []
    raw_weights = []
    for i, segment in enumerate(curve.segments):
        half = 0.5 * (segment.t1 - segment.t0)
        t = segment.t0 + half * (x + 1)
        speed = segment.speed(t)
        if not np.any(speed > 0):
            raise CurveError("Segment {} of {} is degenerate: vanishing derivative at every node".format(i, curve.label))
        nodes.append(segment.z(t))
        raw_weights.append(gl_weights * half * speed)

    nodes = np.concatenate(nodes)
    raw_weights = np.concatenate(raw_weights)
    total = math.fsum(raw_weights)
    if not total > 0:
        raise CurveError("Normalization sum of the measure on {} is zero".format(curve.label))
    weights = raw_weights / total
    if np.any(weights <= 0):
        # Only a node exactly at a zero of z' can get here
        raise CurveError("Non-positive quadrature weight on {}".format(curve.label))

    logger.debug("Discretized {} with {} nodes in {:.3f}s".format(curve.label, nodes.shape[0],
                                                                   time.time() - start_time))
    return DiscretizedMeasure(nodes, weights, [nodes_per_segment] * len(curve.segments), QUADRATURE_RULE,
                              curve.label)


def arc_length(curve):
    """
    Total length of the curve, sum over segments of the adaptive quadrature of |z'(t)|.
    Raises CurveError when scipy.integrate.quad reports non-convergence
    """
    total = 0.0
    for i, segment in enumerate(curve.segments):
        with warnings.catch_warnings():
            warnings.simplefilter('error', IntegrationWarning)
            try:
                res = integrate.quad(lambda t: float(segment.speed(np.array([t]))[0]), segment.t0, segment.t1,
                                     epsabs=0.0, epsrel=ARC_LENGTH_RTOL, limit=ARC_LENGTH_LIMIT, full_output=1)
            except IntegrationWarning as e:
                raise CurveError("Arc length quadrature failed on segment {} of {}: {}".format(i, curve.label, e))
        value, abserr = res[0], res[1]
        if len(res) > 3 or abserr > ARC_LENGTH_RTOL * max(abs(value), 1e-300):
            raise CurveError("Arc length quadrature did not converge on segment {} of {} (error estimate {:.3e})"
                             .format(i, curve.label, abserr))
        total += value
    logger.debug("Arc length of {}: {}".format(curve.label, total))
    return total
