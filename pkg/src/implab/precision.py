"""Extended-precision context shared by the rotation-number arithmetic.

All theta_n arithmetic runs in mpmath at WORK_DPS decimal digits (well above
2x double precision); dynamics downstream runs in complex128 after the small
differences (theta_n - p/q, multipliers) have been formed exactly here.
"""

import os

import mpmath

WORK_DPS = int(os.environ.get("IMPLAB_DPS", "60"))


def mpctx():
    """A dedicated mp context at the working precision."""
    ctx = mpmath.mp.clone()
    ctx.dps = WORK_DPS
    return ctx


_CTX = mpctx()


def mpf(x):
    """Coerce to the working-precision real type."""
    if isinstance(x, str):
        return _CTX.mpf(x)
    return _CTX.mpf(x)


def golden_tail():
    """(sqrt(5)-1)/2, the default irrational tail; all CF terms are 1."""
    return (_CTX.sqrt(5) - 1) / 2


def unit_root(theta):
    """exp(2*pi*i*theta) at working precision, returned as complex128."""
    z = _CTX.expjpi(2 * _CTX.mpf(theta))
    return complex(z)


def to_float(x):
    return float(_CTX.mpf(x))
