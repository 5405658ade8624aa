"""
Command line entry point and the reproduction recipes for the worked examples:
the arc of circle, the cross and the qualitative drop and spiral figures
"""
import argparse
import math
import os
import sys
import time

from joblib import Parallel, delayed
from tabulate import tabulate

from classes import logger, chunks, config_hash, output_dir, ResultFile, HessmapError, ConfigError
from constants import CROSS_THETA_TABLE, ARC_THRESHOLDS, DEFAULT_SAMPLES, NODES_PER_DEGREE
from conformal import Hessenberg, Toeplitz, Riemann
from conformal.Pipeline import parse_config, Pipeline

COMMANDS = ('moments', 'hessenberg', 'diagnostics', 'capacity', 'map', 'grid', 'repro')
JOBS = {'moments': 'moments', 'hessenberg': 'hessenberg', 'diagnostics': 'diagnostics', 'capacity': 'capacity',
        'map': 'map', 'grid': 'grid'}


def _arc_errors(section, reference, indices, samples):
    return [(n, Riemann.sup_difference(Riemann.approximant(section, n), reference, 1.0, samples)) for n in indices]


def example1_table(out_dir=None, a=2.0, max_n=80, samples=DEFAULT_SAMPLES, n_jobs=1):
    """
    Arc of circle: sampled sup |h_n - phi| on the unit circle against the closed-form error law
    ((5 + 2 sqrt 3)/4) (sqrt 3 / 2)^n, and the first n below each threshold of the published table.

    Writes example1_errors.csv (n, sup_error, law_bound, theta2, error_bound) and
    example1_thresholds.csv (threshold, first_n, published_n)
    """
    start_time = time.time()
    section = Hessenberg.closed_form_arc_hessenberg(a, max_n + 1)
    reference = Riemann.ReferenceMap('arc', a=a)
    diagnostics = Toeplitz.theta_norms(section, Toeplitz.limits_from_reference(reference, max_n + 1))
    rho = math.sqrt(a * a - 1) / a
    law = (5 + 2 * math.sqrt(3)) / 4

    indices = list(range(1, max_n + 1))
    parts = Parallel(n_jobs=n_jobs)(delayed(_arc_errors)(section, reference, c, samples)
                                    for c in chunks(indices, max(1, n_jobs)))
    errors = dict(e for part in parts for e in part)

    rows = []
    for n in indices:
        bound = Riemann.error_bound(1.0, diagnostics.Theta(n), diagnostics.theta(n), reference, n)
        rows.append((n, errors[n], law * rho ** n, diagnostics.Theta(n), bound))
    thresholds = []
    for threshold, published in ARC_THRESHOLDS:
        first = next((n for n in indices if errors[n] < threshold), -1)
        thresholds.append((threshold, first, published))
        logger.info("sup |h_n - phi| < {} first at n={} (published {})".format(threshold, first, published))

    digest = config_hash({'recipe': 'example1-table', 'a': a, 'max_n': max_n, 'samples': samples})
    base = output_dir(out_dir)
    ResultFile(os.path.join(base, 'example1_errors.csv'), digest).write_csv(
        ['n', 'sup_error', 'law_bound', 'theta2', 'error_bound'], rows)
    ResultFile(os.path.join(base, 'example1_thresholds.csv'), digest).write_csv(
        ['threshold', 'first_n', 'published_n'], thresholds)
    logger.info("example1-table completed in {:.3f}s".format(time.time() - start_time))
    return thresholds


def cross_9x9(out_dir=None):
    """
    9 x 9 section for the uniform measure on [-1, 1] U [-i, i], written as i,j,re,im triples
    """
    config = parse_config({'curve': {'kind': 'cross', 'a': 1, 'b': 1}, 'n': 9, 'reference': 'cross',
                           'outputs': [{'kind': 'hessenberg', 'path': 'cross_9x9.csv'}]}, out_dir=out_dir)
    pipeline = Pipeline(config)
    pipeline.run()
    return pipeline.report


def cross_theta(out_dir=None, max_n=96, n_jobs=1):
    """
    Theta_n and theta_n for the cross against the analytic limits, next to the published values.
    Writes cross_theta.csv (n, theta2, theta1, published_theta2, published_theta1, deviation2, deviation1)
    """
    size = max_n + 1
    config = parse_config({'curve': {'kind': 'cross', 'a': 1, 'b': 1}, 'n': size, 'reference': 'cross',
                           'n_jobs': n_jobs,
                           'outputs': [{'kind': 'diagnostics', 'path': 'cross_diagnostics.csv'},
                                       {'kind': 'capacity', 'path': 'cross_capacity.csv',
                                        'params': {'windows': [8, 16]}}]}, out_dir=out_dir)
    pipeline = Pipeline(config)
    report = pipeline.run()
    if report.exit_status:
        return report
    diagnostics = pipeline.diagnostics('analytic')
    rows = []
    for n in sorted(CROSS_THETA_TABLE):
        if n > max_n:
            continue
        published2, published1 = CROSS_THETA_TABLE[n]
        t2, t1 = diagnostics.Theta(n), diagnostics.theta(n)
        rows.append((n, t2, t1, published2, published1, abs(t2 - published2), abs(t1 - published1)))
    path = ResultFile(config.resolve_path('cross_theta.csv'), config.digest).write_csv(
        ['n', 'theta2', 'theta1', 'published_theta2', 'published_theta1', 'deviation2', 'deviation1'], rows)
    report.outputs.append(path)
    report.add('max Theta deviation', max(r[5] for r in rows))
    return report


def _boundary_figure(name, curve, indices, out_dir, reference=None, grids=()):
    size = max(indices) + 1
    outputs = []
    for n in indices:
        outputs.append({'kind': 'boundary', 'path': '{}_h{}.csv'.format(name, n), 'params': {'n': n}})
        outputs.append({'kind': 'boundary', 'path': '{}_h{}.svg'.format(name, n), 'format': 'svg',
                        'params': {'n': n}})
        for label, radii in grids:
            stem = '{}_h{}_{}'.format(name, n, label)
            outputs.append({'kind': 'grid', 'path': stem + '.csv', 'params': {'n': n, 'radii': list(radii)}})
            outputs.append({'kind': 'grid', 'path': stem + '.svg', 'format': 'svg',
                            'params': {'n': n, 'radii': list(radii)}})
    doc = {'curve': curve, 'n': size, 'quadrature': {'nodes_per_segment': max(256, NODES_PER_DEGREE * size)},
           'outputs': outputs}
    if reference is not None:
        doc['reference'] = reference
    pipeline = Pipeline(parse_config(doc, out_dir=out_dir))
    pipeline.run()
    return pipeline.report


def example1_figures(out_dir=None, a=2.0):
    """
    Arc of circle: h_16, h_21 and h_37 on the unit circle, and their equipotential curves h_n(|z| = r)
    for r in (1, 1.5]
    """
    return _boundary_figure('example1', {'kind': 'arc_circle', 'a': a}, (16, 21, 37), out_dir, reference='arc',
                            grids=[('equipotentials', (1.1, 1.2, 1.3, 1.4, 1.5))])


def cross_figures(out_dir=None):
    """
    Cross [-1, 1] U [-i, i]: h_12, h_32 and h_60 on the unit circle, with the images of |z| = r for r in [1, 2]
    and the close-up r in [1, 1.1]
    """
    return _boundary_figure('cross', {'kind': 'cross', 'a': 1, 'b': 1}, (12, 32, 60), out_dir, reference='cross',
                            grids=[('far', (1.25, 1.5, 1.75, 2.0)), ('near', (1.025, 1.05, 1.075, 1.1))])


def drop_boundary(out_dir=None):
    """
    h_5, h_8 and h_11 on the unit circle for the drop-shaped curve z = u^2 / (1 + 2u), u = e^{it}, t in [0, pi]
    """
    return _boundary_figure('drop', {'kind': 'drop'}, (5, 8, 11), out_dir)


def spiral_boundary(out_dir=None):
    """
    h_7 and h_11 on the unit circle for the spiral z = t e^{it} / 6, t in [0, 2 pi]
    """
    return _boundary_figure('spiral', {'kind': 'spiral'}, (7, 11), out_dir)


RECIPES = {
    'example1-table': example1_table,
    'example1-figures': example1_figures,
    'cross-9x9': cross_9x9,
    'cross-theta': cross_theta,
    'cross-figures': cross_figures,
    'drop-boundary': drop_boundary,
    'spiral-boundary': spiral_boundary,
}


def main(argv=None):
    parser = argparse.ArgumentParser(description="Exterior Riemann maps from the Hessenberg matrix of a measure")
    parser.add_argument('command', choices=COMMANDS)
    parser.add_argument('target', help="JSON run configuration, or the recipe name for repro")
    parser.add_argument('--n', type=int, help="Hessenberg section size, overrides the config")
    parser.add_argument('--out-dir', help="Directory for relative output paths")
    parser.add_argument('--precision', choices=('double', 'extended'), help="Overrides the config precision mode")
    args = parser.parse_args(argv)

    if args.command == 'repro':
        if args.target not in RECIPES:
            logger.error("Unknown recipe {}, expected one of {}".format(args.target, ', '.join(sorted(RECIPES))))
            return 2
        try:
            res = RECIPES[args.target](out_dir=args.out_dir)
        except HessmapError as e:
            logger.error("Recipe {} failed: {}".format(args.target, e))
            return 1
        if isinstance(res, list):
            print(tabulate(res, headers=['threshold', 'first n', 'published n']))
            return 0
        print(res.table())
        return res.exit_status

    try:
        with open(args.target) as fh:
            config = parse_config(fh.read(), n=args.n, precision=args.precision, out_dir=args.out_dir)
    except (IOError, ConfigError) as e:
        logger.error("Invalid configuration {}: {}".format(args.target, e))
        return 2
    report = Pipeline(config).run(JOBS[args.command])
    print(report.table())
    return report.exit_status


if __name__ == '__main__':
    sys.exit(main())
