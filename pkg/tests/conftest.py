import os

# Keep test runs from writing run.log into the working tree
os.environ.setdefault('HESSMAP_LOG_FILE', '')

import pytest

from conformal import Geometry, Hessenberg


@pytest.fixture(scope='session')
def cross_measure():
    curve = Geometry.build_curve({'kind': 'cross', 'a': 1, 'b': 1})
    return Geometry.discretize_measure(curve, 512)


@pytest.fixture(scope='session')
def cross_section(cross_measure):
    return Hessenberg.hessenberg_arnoldi(cross_measure, 61)


@pytest.fixture(scope='session')
def interval_measure():
    curve = Geometry.build_curve({'kind': 'interval', 'a': -1, 'b': 1})
    return Geometry.discretize_measure(curve, 256)


@pytest.fixture(scope='session')
def circle_measure():
    return Geometry.discretize_measure(Geometry.build_curve({'kind': 'circle'}), 128)


@pytest.fixture(scope='session')
def arc_section():
    return Hessenberg.closed_form_arc_hessenberg(2.0, 81)


@pytest.fixture(scope='session')
def cross_section_97():
    curve = Geometry.build_curve({'kind': 'cross', 'a': 1, 'b': 1})
    return Hessenberg.hessenberg_arnoldi(Geometry.discretize_measure(curve, 8 * 97), 97)
