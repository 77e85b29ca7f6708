"""Pseudo complex volume and mod-i*pi^2 arithmetic.

pvol = vol_C(M) - (pi/2) * sum_i log t_i, with the imaginary part
reduced to the canonical strip [0, pi^2).  Relation searches must use
the unreduced value together with the explicit period i*pi^2; reduction
destroys the Z-linear structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath

from .numerics import is_mp, pi_like


class VolumeError(ValueError):
    pass


@dataclass(frozen=True)
class PseudoVolume:
    value: complex        # canonical representative, Im in [0, pi^2)
    unreduced: complex


def reduce_mod_ipisq(z):
    """Canonical representative with Im(z) in [0, pi^2); Re unchanged."""
    pisq = pi_like(z) ** 2
    im = z.imag
    k = math.floor(float(im / pisq))
    im = im - k * pisq
    # guards against boundary rounding and underflow in im/pisq
    if im < 0:
        im += pisq
    if im >= pisq:
        im -= pisq
    if is_mp(z):
        return mpmath.mpc(z.real, im)
    return complex(z.real, im)


def pseudo_volume(descriptor, solution):
    """Pseudo complex volume of a solved filling.

    Requires the descriptor to carry vol_C(M); both the reduced
    representative and the unreduced value are returned.
    """
    if descriptor.vol_complex is None:
        raise VolumeError(
            "descriptor has no complex volume; pvol is undefined without it")
    total = 0 * solution.log_t[0]
    for lt in solution.log_t:
        total = total + lt
    half_pi = pi_like(total) / 2
    unreduced = descriptor.vol_complex - half_pi * total
    return PseudoVolume(value=reduce_mod_ipisq(unreduced), unreduced=unreduced)


def congruent_mod_ipisq(a, b, tol=1e-9):
    """True iff a - b is an integer multiple of i*pi^2 within tolerance."""
    za = a.value if isinstance(a, PseudoVolume) else a
    zb = b.value if isinstance(b, PseudoVolume) else b
    diff = za - zb
    if abs(diff.real) > tol:
        return False
    pisq = pi_like(diff) ** 2
    frac = diff.imag / pisq
    return abs(frac - round(float(frac))) <= tol / float(pisq)
