__all__ = [
    'Geometry',
    'Moments',
    'Hessenberg',
    'Riemann',
    'Toeplitz',
    'Pipeline'
]

from conformal import Geometry
from conformal import Moments
from conformal import Hessenberg
from conformal import Riemann
from conformal import Toeplitz
from conformal import Pipeline
