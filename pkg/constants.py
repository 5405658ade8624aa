ARTIFACT_VERSION = '0.3.0'
LOG_FILE = 'run.log'
OUTPUT_PATH = 'output'
OUT_DIR_ENV = 'HESSMAP_OUT_DIR'
LOG_FILE_ENV = 'HESSMAP_LOG_FILE'

# Quadrature
QUADRATURE_RULE = 'gauss-legendre'
MIN_NODES_PER_SEGMENT = 128
NODES_PER_DEGREE = 8  # nodes_per_segment = max(MIN_NODES_PER_SEGMENT, NODES_PER_DEGREE * n)
ARC_LENGTH_RTOL = 1e-10
ARC_LENGTH_LIMIT = 500  # subintervals allowed to scipy.integrate.quad

# Linear algebra
PIVOT_TOLERANCE = 1e-13  # relative to entry(0,0) of the moment matrix
BREAKDOWN_TOLERANCE = 1e-14  # relative to the norm of the starting vector
DEFAULT_DIGITS = 40
MIN_EXTENDED_DIGITS = 15
MAX_SERIES_DEPTH = 4096

# Sampling
DEFAULT_SAMPLES = 4096
MIN_SUP_SAMPLES = 16
SVG_POINTS = 720
SVG_SIZE = 480
SVG_HASH_SALT = 'hessmap'

OUTPUT_KINDS = ('moments', 'hessenberg', 'diagnostics', 'boundary', 'grid', 'capacity')
GENERATORS = ('auto', 'arnoldi', 'moments', 'jacobi_limit', 'jacobi_legendre', 'shift', 'closed_form_arc')
CURVE_KINDS = ('interval', 'cross', 'arc_circle', 'drop', 'spiral', 'polyline', 'circle')
REFERENCE_KINDS = ('arc', 'cross', 'joukowski', 'identity_circle')

# Numerical values of Theta_n and theta_n for the uniform measure on the cross [-1,1] U [-i,i]
CROSS_THETA_TABLE = {
    4: (0.1756039179, 0.1771699698),
    8: (0.8706648269e-1, 0.1081557877),
    12: (0.5894618764e-1, 0.846332410e-1),
    16: (0.4475241502e-1, 0.716638451e-1),
    20: (0.3613474685e-1, 0.631649554e-1),
    24: (0.3032967468e-1, 0.570537158e-1),
    28: (0.2614682972e-1, 0.523932383e-1),
    32: (0.2298656524e-1, 0.486911124e-1),
    36: (0.2051319544e-1, 0.456605530e-1),
    40: (0.1852386296e-1, 0.431218007e-1),
    44: (0.1688863030e-1, 0.409557583e-1),
    48: (0.1552035810e-1, 0.390800153e-1),
    52: (0.1435839520e-1, 0.374355145e-1),
    56: (0.1335920853e-1, 0.359786966e-1),
    60: (0.1249073290e-1, 0.346766415e-1),
    64: (0.1172882241e-1, 0.335039558e-1),
    68: (0.1105494437e-1, 0.324406982e-1),
    72: (0.1045463567e-1, 0.314709643e-1),
    76: (0.9916442395e-2, 0.305818978e-1),
    80: (0.9431174829e-2, 0.297629768e-1),
    84: (0.8991373805e-2, 0.290054994e-1),
    88: (0.8590921072e-2, 0.283021988e-1),
    92: (0.8224750644e-2, 0.276469516e-1),
    96: (0.7888631635e-2, 0.270345579e-1),
}

# Sup-norm thresholds for h_n on the unit circle, arc of circle with a = 2
ARC_THRESHOLDS = ((0.2, 17), (0.1, 22), (0.01, 38), (0.001, 54), (0.0001, 70))
