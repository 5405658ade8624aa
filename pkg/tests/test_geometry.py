import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from classes import CurveError
from conformal.Geometry import build_curve, discretize_measure, arc_length, arc_circle_angle


def test_unknown_kind():
    with pytest.raises(CurveError):
        build_curve({'kind': 'lemniscate'})


def test_interval_requires_ordered_endpoints():
    with pytest.raises(CurveError, match="interval requires a < b"):
        build_curve({'kind': 'interval', 'a': 1, 'b': -1})


def test_missing_parameter():
    with pytest.raises(CurveError, match="missing parameter"):
        build_curve({'kind': 'arc_circle'})


def test_polyline_repeated_vertex():
    with pytest.raises(CurveError):
        build_curve({'kind': 'polyline', 'vertices': [[0, 0], [1, 0], [1, 0]]})


@pytest.mark.parametrize('spec,length', [
    ({'kind': 'interval', 'a': -1, 'b': 1}, 2.0),
    ({'kind': 'cross', 'a': 1, 'b': 1}, 4.0),
    ({'kind': 'cross', 'a': 2, 'b': 0.5}, 5.0),
    ({'kind': 'circle'}, 2 * math.pi),
    ({'kind': 'arc_circle', 'a': 2}, 2 * math.pi - 2 * math.pi / 3),
    ({'kind': 'polyline', 'vertices': [[0, 0], [3, 0], [3, 4]]}, 7.0),
])
def test_arc_length(spec, length):
    assert_allclose(arc_length(build_curve(spec)), length, rtol=1e-10)


def test_arc_circle_gap():
    # Arc of the unit circle from e^{i pi/3} to e^{-i pi/3} through -1
    assert_allclose(arc_circle_angle(2.0), math.pi / 3, rtol=1e-14)
    start, stop = build_curve({'kind': 'arc_circle', 'a': 2}).segments[0].endpoints
    assert_allclose(start, np.exp(1j * math.pi / 3), atol=1e-14)
    assert_allclose(stop, np.exp(-1j * math.pi / 3), atol=1e-14)


@pytest.mark.parametrize('spec', [
    {'kind': 'interval', 'a': -1, 'b': 1},
    {'kind': 'cross', 'a': 1, 'b': 1},
    {'kind': 'drop'},
    {'kind': 'spiral'},
])
def test_measure_is_probability(spec):
    measure = discretize_measure(build_curve(spec), 64)
    assert measure.total_mass == pytest.approx(1.0, abs=1e-14)
    assert np.all(measure.weights > 0)
    assert len(measure) == 64 * len(build_curve(spec).segments)


def test_measure_is_read_only():
    measure = discretize_measure(build_curve({'kind': 'interval', 'a': 0, 'b': 1}), 8)
    with pytest.raises(ValueError):
        measure.weights[0] = 0.5


def test_interval_moments():
    # Uniform measure on [-1, 1]: int x^2 = 1/3, int x^4 = 1/5, odd moments vanish
    measure = discretize_measure(build_curve({'kind': 'interval', 'a': -1, 'b': 1}), 32)
    assert_allclose(measure.moment(2), 1.0 / 3, rtol=1e-14)
    assert_allclose(measure.moment(4), 1.0 / 5, rtol=1e-14)
    assert abs(measure.moment(3)) < 1e-15


def test_cross_moments():
    # sum over the four arms of int_0^1 (d t)^4 dt / 4 with d^4 = 1
    measure = discretize_measure(build_curve({'kind': 'cross', 'a': 1, 'b': 1}), 32)
    assert_allclose(measure.moment(4), 0.2, rtol=1e-14)
    assert abs(measure.moment(2)) < 1e-15
    assert_allclose(measure.moment(1, 1), 1.0 / 3, rtol=1e-14)


def test_too_few_nodes():
    with pytest.raises(ValueError):
        discretize_measure(build_curve({'kind': 'circle'}), 1)


@pytest.mark.parametrize('spec', [
    {'kind': 'interval', 'a': -1, 'b': 1},
    {'kind': 'cross', 'a': 1, 'b': 1},
    {'kind': 'arc_circle', 'a': 2},
    {'kind': 'circle'},
    {'kind': 'drop'},
    {'kind': 'spiral'},
])
def test_moments_stable_under_node_doubling(spec):
    curve = build_curve(spec)
    coarse = discretize_measure(curve, 128)
    fine = discretize_measure(curve, 256)
    worst = max(abs(coarse.moment(j, k) - fine.moment(j, k)) for j in range(13) for k in range(13))
    assert worst < 1e-10


def test_nodes_lie_on_the_curve():
    nodes = discretize_measure(build_curve({'kind': 'interval', 'a': -1, 'b': 2}), 64).nodes
    assert np.all(nodes.imag == 0)
    assert np.all((nodes.real > -1) & (nodes.real < 2))

    nodes = discretize_measure(build_curve({'kind': 'cross', 'a': 2, 'b': 0.5}), 64).nodes
    assert np.all((nodes.real == 0) | (nodes.imag == 0))
    assert np.all((np.abs(nodes.real) <= 2) & (np.abs(nodes.imag) <= 0.5))

    nodes = discretize_measure(build_curve({'kind': 'arc_circle', 'a': 2}), 64).nodes
    assert_allclose(np.abs(nodes), 1.0, rtol=1e-15)
    # The gap of the arc is the part of the circle with Re z > 1/2
    assert np.all(nodes.real <= 0.5)


def test_spiral_endpoints():
    start, stop = build_curve({'kind': 'spiral'}).segments[0].endpoints
    assert start == 0
    assert stop.real == pytest.approx(2 * math.pi / 6, rel=1e-15)
    assert abs(stop.imag) < 1e-15


def test_drop_length_matches_gauss_legendre():
    curve = build_curve({'kind': 'drop'})
    length = arc_length(curve)
    assert length == pytest.approx(1.66193397, abs=1e-7)
    segment = curve.segments[0]
    half = 0.5 * (segment.t1 - segment.t0)
    for nodes in (64, 128):
        x, w = np.polynomial.legendre.leggauss(nodes)
        value = math.fsum(w * half * segment.speed(segment.t0 + half * (x + 1)))
        assert value == pytest.approx(length, abs=1e-8)
