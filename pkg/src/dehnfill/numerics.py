"""Precision-generic complex arithmetic helpers.

Everything downstream (series, solver, volume) works either with native
python complex numbers or with mpmath.mpc at a caller-chosen number of
decimal digits.  These helpers dispatch on the value type so the same
code path serves both.
"""

import cmath
import math

import mpmath

MP_TYPES = (mpmath.mpf, mpmath.mpc)


def is_mp(z):
    return isinstance(z, MP_TYPES)


def cexp(z):
    if is_mp(z):
        return mpmath.exp(z)
    return cmath.exp(z)


def clog(z):
    if is_mp(z):
        return mpmath.log(z)
    return cmath.log(z)


def pi_like(z):
    """Pi in the same arithmetic as z."""
    if is_mp(z):
        return +mpmath.pi
    return math.pi


def two_pi_i(z):
    """2*pi*i in the same arithmetic as z."""
    if is_mp(z):
        return 2j * (+mpmath.pi)
    return 2j * math.pi


def zero_like(z):
    if is_mp(z):
        return mpmath.mpc(0)
    return 0j


def parse_number(value, dps=None):
    """Parse a JSON scalar (number or decimal string) to a real number.

    Decimal strings are authoritative: with dps set, they are read at that
    precision; without, they become doubles.
    """
    if dps is not None:
        with mpmath.workdps(dps):
            return mpmath.mpf(str(value))
    return float(value)


def parse_complex(pair, dps=None):
    """Parse a [re, im] pair of JSON scalars to a complex number."""
    re = parse_number(pair[0], dps)
    im = parse_number(pair[1], dps)
    if dps is not None:
        return mpmath.mpc(re, im)
    return complex(re, im)


def solve_linear(A, b):
    """Solve the small dense linear system A x = b by Gaussian elimination.

    Works for entries of either supported type; sizes here are the number
    of cusps, so no pivoting sophistication is needed beyond partial
    pivoting.
    """
    n = len(b)
    M = [list(row) + [b[i]] for i, row in enumerate(A)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(M[r][col]))
        if abs(M[piv][col]) == 0:
            raise ZeroDivisionError("singular linear system")
        M[col], M[piv] = M[piv], M[col]
        inv = 1 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f != 0:
                for c in range(col, n + 1):
                    M[r][c] -= f * M[col][c]
    x = [None] * n
    for r in range(n - 1, -1, -1):
        acc = M[r][n]
        for c in range(r + 1, n):
            acc -= M[r][c] * x[c]
        x[r] = acc / M[r][r]
    return x
