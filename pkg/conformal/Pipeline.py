"""
Run configuration and the staged pipeline curve -> measure -> D -> diagnostics -> maps -> result files
"""
import copy
import json
import os
import time

import numpy as np
from tabulate import tabulate

from classes import logger, config_hash, output_dir, ResultFile, HessmapError, CurveError, ConfigError, StageError
from constants import (CURVE_KINDS, GENERATORS, OUTPUT_KINDS, REFERENCE_KINDS, DEFAULT_DIGITS, MIN_EXTENDED_DIGITS,
                       MIN_NODES_PER_SEGMENT, NODES_PER_DEGREE, DEFAULT_SAMPLES, MIN_SUP_SAMPLES, SVG_POINTS)
from conformal import Geometry, Moments, Hessenberg, Toeplitz, Riemann

TOP_LEVEL_FIELDS = {'curve', 'n', 'quadrature', 'precision', 'reference', 'generator', 'outputs', 'samples',
                    'window', 'n_jobs'}
DEFAULT_RADII = [1.1, 1.25, 1.5, 2.0]

# Curve kinds each special generator applies to
GENERATOR_CURVES = {'closed_form_arc': 'arc_circle', 'jacobi_limit': 'interval', 'jacobi_legendre': 'interval',
                    'shift': 'circle'}


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _int_field(doc, key, path, minimum, default=None):
    value = doc.get(key, default)
    if not _is_int(value):
        raise ConfigError(path, "expected an integer, got {!r}".format(value))
    if value < minimum:
        raise ConfigError(path, "must be at least {}, got {}".format(minimum, value))
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, "expected a number, got {!r}".format(value))
    return float(value)


class OutputSpec(object):
    def __init__(self, kind, path, format='csv', params=None):
        self.kind = kind
        self.path = path
        self.format = format
        self.params = dict(params or {})

    def __repr__(self):
        return "OutputSpec({}, {}, {})".format(self.kind, self.path, self.format)


class RunConfig(object):
    """
    Validated run configuration.  document is the canonical dict (defaults applied) the config hash is taken over
    """
    def __init__(self, document, out_dir=None):
        self.document = document
        self.out_dir = out_dir
        self.curve = document['curve']
        self.n = document['n']
        self.nodes_per_segment = document['quadrature']['nodes_per_segment']
        self.precision = document['precision']['mode']
        self.digits = document['precision'].get('digits')
        self.reference = document['reference']
        self.generator = document['generator']
        self.samples = document['samples']
        self.window = document['window']
        self.n_jobs = document['n_jobs']
        self.outputs = [OutputSpec(**o) for o in document['outputs']]
        self.digest = config_hash(document)

    @property
    def resolved_generator(self):
        if self.generator != 'auto':
            return self.generator
        if self.curve['kind'] == 'arc_circle':
            return 'closed_form_arc'
        if self.precision == 'extended':
            return 'moments'
        return 'arnoldi'

    @property
    def needs_quadrature(self):
        return self.resolved_generator in ('arnoldi', 'moments')

    def reference_map(self):
        if self.reference is None:
            return None
        params = dict(self.reference)
        kind = params.pop('kind')
        return Riemann.ReferenceMap(kind, **params)

    def resolve_path(self, path):
        if os.path.isabs(path):
            return path
        return os.path.join(output_dir(self.out_dir), path)


def _parse_curve(doc):
    if not isinstance(doc, dict):
        raise ConfigError('curve', "expected an object")
    kind = doc.get('kind')
    if kind not in CURVE_KINDS:
        raise ConfigError('curve.kind', "unknown curve kind {!r}, expected one of {}".format(kind, ', '.join(CURVE_KINDS)))
    try:
        curve = Geometry.build_curve(doc)
    except CurveError as e:
        raise ConfigError('curve', str(e))
    return dict(curve.params, kind=kind)


def _parse_precision(doc):
    if doc is None:
        doc = {'mode': 'double'}
    elif isinstance(doc, str):
        doc = {'mode': doc}
    if not isinstance(doc, dict):
        raise ConfigError('precision', "expected an object or a mode string")
    mode = doc.get('mode', 'double')
    if mode == 'double':
        return {'mode': 'double'}
    if mode != 'extended':
        raise ConfigError('precision.mode', "expected 'double' or 'extended', got {!r}".format(mode))
    digits = _int_field(doc, 'digits', 'precision.digits', MIN_EXTENDED_DIGITS, DEFAULT_DIGITS)
    return {'mode': 'extended', 'digits': digits}


def _parse_reference(doc, curve):
    if doc is None:
        return None
    if isinstance(doc, str):
        doc = {'kind': doc}
    if not isinstance(doc, dict):
        raise ConfigError('reference', "expected a reference kind or an object")
    kind = doc.get('kind')
    if kind not in REFERENCE_KINDS:
        raise ConfigError('reference.kind', "unknown reference map {!r}".format(kind))
    params = dict((k, v) for k, v in doc.items() if k != 'kind')
    if not params:
        default = Riemann.reference_for_curve(curve['kind'], curve)
        if default is None or default.kind != kind:
            raise ConfigError('reference', "reference {} does not apply to a curve of kind {}".format(
                kind, curve['kind']))
        params = dict(default.params)
    for k, v in params.items():
        params[k] = _number(v, 'reference.{}'.format(k))
    try:
        Riemann.ReferenceMap(kind, **params)
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError('reference', "invalid parameters for {}: {}".format(kind, e))
    return dict(params, kind=kind)


def _parse_output(doc, i, n, samples, reference=None):
    path = 'outputs[{}]'.format(i)
    if not isinstance(doc, dict):
        raise ConfigError(path, "expected an object")
    kind = doc.get('kind')
    if kind not in OUTPUT_KINDS:
        raise ConfigError(path + '.kind', "unknown output kind {!r}".format(kind))
    target = doc.get('path')
    if not isinstance(target, str) or not target:
        raise ConfigError(path + '.path', "expected a nonempty string")
    fmt = doc.get('format', 'csv')
    if fmt not in ('csv', 'svg'):
        raise ConfigError(path + '.format', "expected 'csv' or 'svg', got {!r}".format(fmt))
    if fmt == 'svg' and kind not in ('boundary', 'grid'):
        raise ConfigError(path + '.format', "svg is only available for boundary and grid outputs")
    params = doc.get('params', {})
    if not isinstance(params, dict):
        raise ConfigError(path + '.params', "expected an object")
    params = dict(params)
    ppath = path + '.params'

    if kind == 'moments':
        params['order'] = _int_field(params, 'order', ppath + '.order', 1, n + 1)
    elif kind in ('boundary', 'grid'):
        index = _int_field(params, 'n', ppath + '.n', 1, n - 1)
        if index > n - 1:
            raise ConfigError(ppath + '.n', "approximant index must be at most {}, got {}".format(n - 1, index))
        params['n'] = index
        params['samples'] = _int_field(params, 'samples', ppath + '.samples', 2,
                                       SVG_POINTS if fmt == 'svg' else samples)
        if kind == 'boundary':
            radius = _number(params.get('radius', 1.0), ppath + '.radius')
            if radius < 1:
                raise ConfigError(ppath + '.radius', "must be at least 1, got {}".format(radius))
            params['radius'] = radius
        else:
            radii = params.get('radii', DEFAULT_RADII)
            if not isinstance(radii, list) or not radii:
                raise ConfigError(ppath + '.radii', "expected a nonempty list")
            radii = [_number(r, '{}.radii[{}]'.format(ppath, j)) for j, r in enumerate(radii)]
            if min(radii) <= 1:
                raise ConfigError(ppath + '.radii', "every radius must be > 1")
            params['radii'] = radii
    elif kind == 'diagnostics':
        limits = params.get('limits', 'auto')
        if limits not in ('auto', 'analytic', 'estimated'):
            raise ConfigError(ppath + '.limits', "expected 'auto', 'analytic' or 'estimated'")
        if limits == 'analytic' and reference is None:
            raise ConfigError(ppath + '.limits', "analytic limits need a reference map")
        if (limits == 'estimated' or reference is None) and n < 3:
            # Estimated limits need a window with 1 <= window < n/2
            raise ConfigError(ppath + '.limits', "estimated limits need n >= 3, got n={}".format(n))
        params['limits'] = limits
    elif kind == 'capacity':
        windows = params.get('windows', [])
        if not isinstance(windows, list) or not all(_is_int(w) and 1 <= w < n for w in windows):
            raise ConfigError(ppath + '.windows', "expected a list of integers in [1, {}]".format(n - 1))
        params['windows'] = windows
    return {'kind': kind, 'path': target, 'format': fmt, 'params': params}


def parse_config(text, n=None, precision=None, out_dir=None):
    """
    Validates a JSON run configuration and fills in the defaults.

    Arguments:
    ----------
    text: JSON string or an already decoded dict

    n, precision, out_dir: command line overrides
    """
    if isinstance(text, dict):
        doc = copy.deepcopy(text)
    else:
        try:
            doc = json.loads(text)
        except ValueError as e:
            raise ConfigError('$', "not a valid JSON document: {}".format(e))
    if not isinstance(doc, dict):
        raise ConfigError('$', "expected a JSON object")
    unknown = sorted(set(doc) - TOP_LEVEL_FIELDS)
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    if n is not None:
        doc['n'] = n
    if precision is not None:
        doc['precision'] = {'mode': precision}

    if 'curve' not in doc:
        raise ConfigError('curve', "missing required field")
    curve = _parse_curve(doc['curve'])
    if 'n' not in doc:
        raise ConfigError('n', "missing required field")
    size = _int_field(doc, 'n', 'n', 2)

    quadrature = doc.get('quadrature', {})
    if not isinstance(quadrature, dict):
        raise ConfigError('quadrature', "expected an object")
    nodes = _int_field(quadrature, 'nodes_per_segment', 'quadrature.nodes_per_segment', 2,
                       max(MIN_NODES_PER_SEGMENT, NODES_PER_DEGREE * size))

    generator = doc.get('generator', 'auto')
    if generator not in GENERATORS:
        raise ConfigError('generator', "unknown generator {!r}".format(generator))
    if generator in GENERATOR_CURVES and curve['kind'] != GENERATOR_CURVES[generator]:
        raise ConfigError('generator', "{} only applies to a curve of kind {}".format(
            generator, GENERATOR_CURVES[generator]))

    samples = _int_field(doc, 'samples', 'samples', MIN_SUP_SAMPLES, DEFAULT_SAMPLES)
    window = doc.get('window')
    if window is not None:
        window = _int_field(doc, 'window', 'window', 1)
        if window >= size:
            raise ConfigError('window', "must be smaller than n={}, got {}".format(size, window))

    outputs = doc.get('outputs', [])
    if not isinstance(outputs, list):
        raise ConfigError('outputs', "expected a list")
    reference = _parse_reference(doc.get('reference'), curve)
    outputs = [_parse_output(o, i, size, samples, reference) for i, o in enumerate(outputs)]
    seen = {}
    for i, o in enumerate(outputs):
        if o['path'] in seen:
            raise ConfigError('outputs[{}].path'.format(i), "conflicting output path {}, also used by outputs[{}]"
                              .format(o['path'], seen[o['path']]))
        seen[o['path']] = i

    document = {
        'curve': curve,
        'n': size,
        'quadrature': {'nodes_per_segment': nodes},
        'precision': _parse_precision(doc.get('precision')),
        'reference': reference,
        'generator': generator,
        'samples': samples,
        'window': window,
        'n_jobs': _int_field(doc, 'n_jobs', 'n_jobs', -1, 1),
        'outputs': outputs,
    }
    return RunConfig(document, out_dir)


class RunReport(object):
    """
    Everything a run produced: output paths, stage timings, condition estimates and comparisons against the
    reference map
    """
    def __init__(self, config):
        self.config_digest = config.digest
        self.outputs = []
        self.timings = []
        self.values = []
        self.sup_differences = []
        self.errors = []

    @property
    def exit_status(self):
        return 1 if self.errors else 0

    def add(self, name, value):
        self.values.append((name, value))

    def get(self, name):
        for key, value in self.values:
            if key == name:
                return value
        raise KeyError(name)

    def table(self):
        lines = ["config {}".format(self.config_digest[:16])]
        lines.append(tabulate(self.timings, headers=['stage', 'seconds'], floatfmt='.3f'))
        if self.values:
            lines.append(tabulate(self.values, headers=['quantity', 'value']))
        if self.sup_differences:
            lines.append(tabulate(self.sup_differences, headers=['n', 'radius', 'sup |h_n - phi|', 'bound'],
                                  floatfmt='.3e'))
        if self.outputs:
            lines.append(tabulate([[p] for p in self.outputs], headers=['output']))
        for stage, message in self.errors:
            lines.append("ERROR in {}: {}".format(stage, message))
        return '\n\n'.join(lines)


class Pipeline(object):
    """
    Executes a RunConfig stage by stage.  Every stage result is cached on the instance

    Properties:
    ===========
    curve: Geometry.Curve

    measure: Geometry.DiscretizedMeasure, or None when the generator needs no quadrature

    section: Hessenberg.HessenbergSection

    reference: Riemann.ReferenceMap or None
    """
    jobs = {'run', 'moments', 'hessenberg', 'diagnostics', 'capacity', 'map', 'grid'}
    job_outputs = {'moments': 'moments', 'hessenberg': 'hessenberg', 'diagnostics': 'diagnostics',
                   'capacity': 'capacity', 'map': 'boundary', 'grid': 'grid'}

    def __init__(self, config):
        self.config = config
        self.report = RunReport(config)
        self.curve = None
        self.measure = None
        self.section = None
        self.reference = config.reference_map()
        self._diagnostics = None
        self._limits = None

    def _stage(self, name, fn, *args):
        start_time = time.time()
        try:
            res = fn(*args)
        except (HessmapError, ValueError, ArithmeticError) as e:
            logger.error("Stage {} failed: {}".format(name, e))
            raise StageError(name, e)
        elapsed = time.time() - start_time
        self.report.timings.append((name, elapsed))
        logger.info("Stage {} completed in {:.3f}s".format(name, elapsed))
        return res

    def build_curve(self):
        self.curve = Geometry.build_curve(self.config.curve)
        return self.curve

    def build_measure(self):
        self.measure = Geometry.discretize_measure(self.curve, self.config.nodes_per_segment)
        self.report.add('nodes', len(self.measure))
        return self.measure

    def build_section(self):
        config = self.config
        generator = config.resolved_generator
        n = config.n
        if generator == 'arnoldi':
            section = Hessenberg.hessenberg_arnoldi(self.measure, n)
        elif generator == 'moments':
            M = Moments.moment_matrix(self.measure, n + 1, config.precision, config.digits)
            self.report.add('moment condition estimate', M.condition_estimate)
            section = Hessenberg.hessenberg_from_moments(M, n)
        elif generator == 'closed_form_arc':
            section = Hessenberg.closed_form_arc_hessenberg(config.curve['a'], n)
        elif generator in ('jacobi_limit', 'jacobi_legendre'):
            section = Hessenberg.jacobi_interval(config.curve['a'], config.curve['b'], n, generator.split('_')[1])
        else:
            section = Hessenberg.circle_shift(n)
        self.section = section
        self.report.add('generator', generator)
        if self.measure is not None:
            self.report.add('recurrence residual', Hessenberg.verify_recurrence(section, self.measure))
        return section

    def limits(self, mode='auto'):
        if mode == 'analytic' and self.reference is None:
            raise ValueError("Analytic diagonal limits need a reference map")
        if mode == 'estimated' or self.reference is None:
            return Toeplitz.estimate_diagonal_limits(self.section, self.config.window and
                                                     min(self.config.window, (self.section.size - 1) // 2))
        if self._limits is None:
            self._limits = Toeplitz.limits_from_reference(self.reference, self.section.size)
        return self._limits

    def diagnostics(self, mode='auto'):
        limits = self.limits(mode)
        section = self.section
        if len(limits) < section.size - 1:
            # Estimated limits only reach the columns whose diagonals were averaged
            m = len(limits) + 1
            section = Hessenberg.HessenbergSection(section.entries[:m, :m], section.source, section.params)
        res = Toeplitz.theta_norms(section, limits)
        if limits.provenance == 'analytic' and mode != 'estimated':
            self._diagnostics = res
        return res

    def capacity(self, window=None):
        window = window or self.config.window or Toeplitz.default_window(self.section.size)
        estimate = Riemann.capacity_estimate(self.section, window)
        reference = self.reference.capacity if self.reference is not None else float('nan')
        return window, estimate.value, reference, abs(estimate.value - reference)

    def _column(self, n):
        if self.reference is None:
            return None
        if self._diagnostics is None:
            self.diagnostics('analytic')
        return n, self._diagnostics.Theta(n), self._diagnostics.theta(n)

    def emit(self, output):
        config = self.config
        params = output.params
        result = ResultFile(config.resolve_path(output.path), config.digest)
        if output.kind == 'moments':
            M = Moments.moment_matrix(self.measure, params['order'], config.precision, config.digits)
            header = []
            for k in range(M.order):
                header += ['re_{}'.format(k), 'im_{}'.format(k)]
            rows = [np.column_stack((row.real, row.imag)).ravel() for row in M.entries]
            path = result.write_csv(header, rows)
        elif output.kind == 'hessenberg':
            path = result.write_csv(['i', 'j', 're', 'im'], self.section.to_triples())
        elif output.kind == 'diagnostics':
            res = self.diagnostics(params['limits'])
            self.report.add('diagnostics limits', res.provenance)
            path = result.write_csv(['n', 'theta2', 'theta1', 'tail_l2'], res.to_rows())
        elif output.kind == 'capacity':
            windows = params['windows'] or [None]
            rows = [self.capacity(w) for w in windows]
            for row in rows:
                self.report.add('capacity (window {})'.format(row[0]), row[1])
                if self.reference is not None:
                    self.report.add('capacity error (window {})'.format(row[0]), row[3])
            path = result.write_csv(['window', 'capacity', 'reference', 'abs_error'], rows)
        elif output.kind == 'boundary':
            h = Riemann.approximant(self.section, params['n'])
            theta, values = Riemann.boundary_image(h, params['samples'], params['radius'])
            if self.reference is not None:
                value, info = Riemann.sup_difference(h, self.reference, params['radius'], config.samples,
                                                     full_output=True, column=self._column(params['n']))
                self.report.sup_differences.append((params['n'], params['radius'], value, info['bound']))
            if output.format == 'svg':
                path = result.write_svg([values])
            else:
                path = result.write_csv(['theta', 're', 'im'], zip(theta, values.real, values.imag))
        else:
            h = Riemann.approximant(self.section, params['n'])
            grid = Riemann.equipotential_grid(h, params['radii'], params['samples'], config.n_jobs)
            if output.format == 'svg':
                path = result.write_svg([values for _, _, values in grid])
            else:
                rows = [(r, t, v.real, v.imag) for r, theta, values in grid for t, v in zip(theta, values)]
                path = result.write_csv(['r', 'theta', 're', 'im'], rows)
        self.report.outputs.append(path)
        return path

    def run(self, job='run', raise_errors=False):
        """
        Primary entry point

        Arguments:
        ----------
        job: string
            'run' emits every configured output.  'moments', 'hessenberg', 'diagnostics', 'capacity', 'map' and
            'grid' emit only the outputs of that kind, or a default CSV output when the config has none

        raise_errors: bool
            Raise the StageError instead of recording it in the report
        """
        if job not in self.jobs:
            raise RuntimeError("{} is not a valid job".format(job))

        outputs = self.config.outputs
        if job != 'run':
            kind = self.job_outputs[job]
            outputs = [o for o in outputs if o.kind == kind]
            if not outputs:
                outputs = [OutputSpec(kind, '{}.csv'.format(kind), 'csv',
                                      _parse_output({'kind': kind, 'path': kind + '.csv'}, 0, self.config.n,
                                                    self.config.samples, self.config.reference)['params'])]

        start_time = time.time()
        try:
            self._stage('curve', self.build_curve)
            if self.config.needs_quadrature or any(o.kind == 'moments' for o in outputs):
                self._stage('measure', self.build_measure)
            if any(o.kind != 'moments' for o in outputs) or not outputs:
                self._stage('hessenberg', self.build_section)
            if self.reference is not None and self.section is not None:
                window, value, _, error = self._stage('capacity', self.capacity)
                self.report.add('capacity (window {})'.format(window), value)
                self.report.add('capacity error', error)
            for o in outputs:
                self._stage('emit {}'.format(o.path), self.emit, o)
        except StageError as e:
            self.report.errors.append((e.stage, str(e.cause)))
            if raise_errors:
                raise
        logger.info("Run {} finished in {:.3f}s with exit status {}".format(
            self.config.digest[:16], time.time() - start_time, self.report.exit_status))
        return self.report


def run(config, job='run', raise_errors=False):
    return Pipeline(config).run(job, raise_errors)
