"""Dormand-Prince 5(4) embedded pair (RK5(4)7M).

Seven stages, first-same-as-last. The fifth-order solution is propagated
and the difference to the embedded fourth-order solution is the local error
estimate. Both kernels (compiled and pure Python) read their coefficients
from this module.

References
----------
Dormand, J. R. and Prince, P. J. (1980). "A family of embedded Runge-Kutta
formulae". J. Comput. Appl. Math. 6(1), 19-26.
"""

from fractions import Fraction as F

NODES = (F(0), F(1, 5), F(3, 10), F(4, 5), F(8, 9), F(1), F(1))

# lower-triangular stage matrix, row i holds a[i][0..i-1]
STAGES = (
    (),
    (F(1, 5),),
    (F(3, 40), F(9, 40)),
    (F(44, 45), F(-56, 15), F(32, 9)),
    (F(19372, 6561), F(-25360, 2187), F(64448, 6561), F(-212, 729)),
    (F(9017, 3168), F(-355, 33), F(46732, 5247), F(49, 176), F(-5103, 18656)),
    (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84)),
)

WEIGHTS_5 = (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84), F(0))
WEIGHTS_4 = (
    F(5179, 57600), F(0), F(7571, 16695), F(393, 640),
    F(-92097, 339200), F(187, 2100), F(1, 40),
)

ORDER = 5
ERROR_ORDER = 4


def as_floats():
    """Return (nodes, stage rows, 5th-order weights, error weights) as floats.

    Error weights are ``WEIGHTS_5 - WEIGHTS_4`` computed exactly before
    rounding, so the error estimate of a degree-0 field is exactly zero.
    """
    nodes = tuple(float(c) for c in NODES)
    rows = tuple(tuple(float(a) for a in row) for row in STAGES)
    b5 = tuple(float(b) for b in WEIGHTS_5)
    err = tuple(float(b - bh) for b, bh in zip(WEIGHTS_5, WEIGHTS_4))
    return nodes, rows, b5, err
