"""
Shared classes for the Hessenberg / Riemann map pipeline
"""

import hashlib
import io
import json
import math
import os
import logging

import matplotlib
matplotlib.use('Agg')
import numpy as np
from matplotlib import pyplot

from constants import ARTIFACT_VERSION, LOG_FILE, LOG_FILE_ENV, OUTPUT_PATH, OUT_DIR_ENV, SVG_SIZE, SVG_HASH_SALT

logger = logging.getLogger('hessmap')
logger.setLevel(logging.DEBUG)
log_formatter = logging.Formatter('%(asctime)s - %(module)s - %(levelname)s - %(message)s',
                                  datefmt='%Y-%m-%d %H:%M:%S')
if not logger.handlers:
    # Log to file, unless HESSMAP_LOG_FILE is set to an empty string
    log_path = os.environ.get(LOG_FILE_ENV, LOG_FILE)
    if log_path:
        logfile = logging.FileHandler(log_path)
        logfile.setLevel(logging.DEBUG)
        logfile.setFormatter(log_formatter)
        logger.addHandler(logfile)
    # Log to console
    logstream = logging.StreamHandler()
    logstream.setLevel(logging.INFO)
    logstream.setFormatter(log_formatter)
    logger.addHandler(logstream)


class HessmapError(RuntimeError):
    """
    Base class for every failure raised by the pipeline
    """


class CurveError(HessmapError):
    pass


class PositiveDefinitenessError(HessmapError):
    """
    Raised when the Cholesky factorization of a moment matrix loses positive definiteness.
    pivot is 1-based, condition is the pivot ratio reached before the failure
    """
    def __init__(self, pivot, condition, message=None):
        self.pivot = pivot
        self.condition = condition
        message = message or ("Moment matrix is not numerically positive definite at pivot {} "
                              "(condition estimate {:.3e}); raise the precision or lower the order").format(pivot,
                                                                                                          condition)
        super(PositiveDefinitenessError, self).__init__(message)


class ArnoldiBreakdown(HessmapError):
    def __init__(self, step, residual):
        self.step = step
        self.residual = residual
        super(ArnoldiBreakdown, self).__init__(
            "Arnoldi breakdown at step {} (residual {:.3e}): the measure is supported on at most {} points "
            "or the discretization is too coarse".format(step, residual, step))


class NonFiniteError(HessmapError, ArithmeticError):
    pass


class ConfigError(HessmapError):
    """
    Schema violation in a run configuration.  field is the dotted path of the offending entry
    """
    def __init__(self, field, message):
        self.field = field
        super(ConfigError, self).__init__("{}: {}".format(field, message))


class StageError(HessmapError):
    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super(StageError, self).__init__("Stage '{}' failed: {}".format(stage, cause))


def chunks(l, n):
    """
    Yield n chunks from l.
    """
    chunk_size = max(1, int(math.ceil(len(l) / n)))

    for i in range(0, len(l), chunk_size):
        yield l[i:i + chunk_size]


def config_hash(document):
    """
    SHA-256 of the canonical JSON form of a config document (sorted keys, no whitespace)
    """
    canonical = json.dumps(document, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def output_dir(override=None):
    """
    Directory that relative output paths are resolved against.
    Order: explicit override, then the HESSMAP_OUT_DIR environment variable, then constants.OUTPUT_PATH
    """
    return override or os.environ.get(OUT_DIR_ENV) or OUTPUT_PATH


def fmt_float(x):
    """
    Shortest decimal string that round-trips to the same double.  Integers are written as integers
    """
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


class ResultFile(object):
    """
    Utility class that takes care of writing result files.  Every file starts with a comment line
    carrying the config hash and the artifact version, so that any output can be traced back to its run.
    """

    def __init__(self, path, config_digest):
        self.path = path
        self.config_digest = config_digest

    @property
    def stamp(self):
        return "config={} version={}".format(self.config_digest[:16], ARTIFACT_VERSION)

    def _prepare(self):
        directory = os.path.dirname(self.path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)

    def write_csv(self, header, rows):
        """
        Writes rows of numbers as CSV with the shortest round-trip representation of every value

        Arguments:
        ----------
        header: list of strings

        rows: 2D array-like of reals
        """
        self._prepare()
        cells = np.array([[fmt_float(v) for v in row] for row in rows], dtype=object)
        if cells.size == 0:
            cells = np.zeros((0, len(header)), dtype=object)
        logger.info("Saving {} rows to file {}".format(cells.shape[0], self.path))
        with open(self.path, 'w') as fh:
            fh.write("# {}\n".format(self.stamp))
            np.savetxt(fh, cells, fmt='%s', delimiter=',', header=','.join(header), comments='')
        return self.path

    def write_svg(self, curves, size=None):
        """
        Draws every curve as a closed black line on blank axes with equal aspect, through the matplotlib svg
        backend.  The date is left out and the id salt is fixed so identical curves give identical files

        Arguments:
        ----------
        curves: list of 1D complex arrays

        size: width and height in pixels
        """
        size = size or SVG_SIZE
        self._prepare()
        fig = pyplot.figure(figsize=(size / 72.0, size / 72.0))
        ax = fig.add_axes([0, 0, 1, 1])
        for i, c in enumerate(curves):
            c = np.asarray(c)
            closed = np.append(c, c[:1])
            line, = ax.plot(closed.real, closed.imag, color='black', linewidth=0.8)
            line.set_gid('curve-{}'.format(i))
        ax.set_aspect('equal', adjustable='datalim')
        ax.margins(0.05)
        ax.set_axis_off()
        buf = io.StringIO()
        with matplotlib.rc_context({'svg.hashsalt': SVG_HASH_SALT}):
            fig.savefig(buf, format='svg', metadata={'Date': None})
        pyplot.close(fig)
        body = buf.getvalue()
        # The stamp comment has to open the file, ahead of the XML declaration
        if body.startswith('<?xml'):
            body = body.split('\n', 1)[1]
        logger.info("Saving {} curves to file {}".format(len(curves), self.path))
        with open(self.path, 'w') as fh:
            fh.write("<!-- {} -->\n".format(self.stamp))
            fh.write(body)
        return self.path
