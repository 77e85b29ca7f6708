"""Tube volumes, boundary torus moduli and fundamental-domain reduction.

The boundary flat structure comes from the equidistant-surface metric
ds^2 = cosh^2(R) dx^2 + sinh^2(R) dtheta^2 around a geodesic of complex
length lambda: the meridian circle has length 2*pi*sinh(R) and the
longitude vector is Re(lambda)*cosh(R) + i*Im(lambda)*sinh(R).

The holonomy-to-length convention is configurable: "derivative" takes
lambda = log t (log of the full translation), "eigenvalue" takes
lambda = 2*log t.  The boundary-convergence check fixes "derivative" as
the default; see the replay function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .solver import SolverOptions, solve_filling


class TubeError(ValueError):
    pass


@dataclass(frozen=True)
class TubeSpec:
    """Tube around a core geodesic: complex length and radius."""
    complex_length: complex
    radius: float

    def __post_init__(self):
        if not self.complex_length.real > 0:
            raise TubeError("complex length must have positive real part")
        if self.radius < 0:
            raise TubeError("radius must be non-negative")


@dataclass(frozen=True)
class TorusModulus:
    tau: complex
    reduced: bool

    def __post_init__(self):
        if not self.tau.imag > 0:
            raise TubeError("modulus must lie in the upper half plane")
        if self.reduced:
            if abs(self.tau.real) > 0.5 + 1e-12 or abs(self.tau) < 1 - 1e-12:
                raise TubeError("claimed-reduced modulus outside fundamental domain")


def tube_volume(spec):
    """Volume of an embedded tube: pi * Re(lambda) * sinh(R)^2."""
    return math.pi * spec.complex_length.real * math.sinh(spec.radius) ** 2


def radius_from_volume(complex_length, target_volume):
    """Invert tube_volume: R = arcsinh(sqrt(V / (pi * Re lambda)))."""
    ell = complex_length.real
    if ell <= 0:
        raise TubeError("complex length must have positive real part")
    if target_volume < 0:
        raise TubeError("volume must be non-negative")
    return math.asinh(math.sqrt(target_volume / (math.pi * ell)))


def boundary_modulus(spec):
    """Modulus of the flat torus on the tube boundary, unreduced.

    Longitude over meridian; the representative is flipped by negation
    (which preserves the lattice Z + Z*tau) into the upper half plane.
    """
    if spec.radius == 0:
        raise TubeError("boundary modulus is degenerate at radius 0")
    lam = spec.complex_length
    R = spec.radius
    meridian = 2j * math.pi * math.sinh(R)
    longitude = complex(lam.real * math.cosh(R), lam.imag * math.sinh(R))
    tau = longitude / meridian
    if tau.imag < 0:
        tau = -tau
    elif tau.imag == 0:
        raise TubeError("degenerate boundary torus (real modulus)")
    return TorusModulus(tau=tau, reduced=False)


def reduce_modulus(tau, max_steps=10 ** 6):
    """Reduce into the fundamental domain |Re| <= 1/2, |tau| >= 1.

    Returns the reduced modulus and the integer matrix (a, b; c, d) with
    tau_reduced = (a*tau + b)/(c*tau + d), plus the word of generators
    applied (T^k and S moves).
    """
    if not tau.imag > 0:
        raise TubeError("modulus must lie in the upper half plane")
    a, b, c, d = 1, 0, 0, 1
    word = []
    z = complex(tau)
    for _ in range(max_steps):
        shift = -round(z.real)
        if shift:
            z = z + shift
            a, b = a + shift * c, b + shift * d
            word.append(("T", shift))
        if abs(z) < 1 - 1e-15:
            z = -1 / z
            a, b, c, d = -c, -d, a, b
            word.append(("S", 1))
        else:
            break
    else:
        raise TubeError("modular reduction did not terminate")
    return TorusModulus(tau=z, reduced=True), (a, b, c, d), word


def apply_mobius(matrix, tau):
    a, b, c, d = matrix
    return (a * tau + b) / (c * tau + d)


HEX_CORNER = complex(-0.5, math.sqrt(3) / 2)
HEX_CORNER_ALT = complex(0.5, math.sqrt(3) / 2)


def symmetric_torus_test(tau, tol=1e-9):
    """Verdict square / hexagonal / asymmetric for a torus modulus."""
    reduced, _, _ = reduce_modulus(tau)
    z = reduced.tau
    if abs(z - 1j) <= tol:
        return "square"
    if abs(z - HEX_CORNER) <= tol or abs(z - HEX_CORNER_ALT) <= tol:
        return "hexagonal"
    return "asymmetric"


LENGTH_CONVENTIONS = ("derivative", "eigenvalue")


def core_complex_length(log_t, convention="derivative"):
    """Complex length of the core geodesic from the normalized log-holonomy."""
    if convention not in LENGTH_CONVENTIONS:
        raise TubeError(f"unknown length convention {convention!r}")
    lam = complex(log_t)
    if convention == "eigenvalue":
        lam = 2 * lam
    if lam.real < 0:
        lam = -lam
    return lam


@dataclass
class RigidityReplay:
    slopes: tuple
    lambdas: tuple
    radii: tuple
    boundary_moduli: tuple          # reduced
    cusp_modulus: complex           # reduced
    holonomies_agree: bool
    moduli_agree: bool
    moduli_vs_cusp: tuple           # per filling: |reduced boundary - reduced cusp|
    slopes_equal: bool

    def as_dict(self):
        def pair(z):
            return [float(z.real), float(z.imag)]
        return {
            "slopes": [f"{p}/{q}" for p, q in self.slopes],
            "lambda": [pair(z) for z in self.lambdas],
            "radius": [float(r) for r in self.radii],
            "boundary_moduli": [pair(z) for z in self.boundary_moduli],
            "cusp_modulus": pair(self.cusp_modulus),
            "holonomies_agree": self.holonomies_agree,
            "moduli_agree": self.moduli_agree,
            "moduli_vs_cusp": [float(x) for x in self.moduli_vs_cusp],
            "slopes_equal": self.slopes_equal,
        }


def appendix_rigidity_replay(descriptor, coeff_a, coeff_b, cusp_volume,
                             convention="derivative", opts=None, tol=1e-8):
    """Numeric replay of the equal-holonomy rigidity argument.

    For two fillings of an asymmetric 1-cusp descriptor: match tube
    volumes to the cusp volume, compare holonomies, boundary moduli and
    slopes.  The report states the implication chain, not a proof.
    """
    if descriptor.n != 1:
        raise TubeError("rigidity replay needs a 1-cusp descriptor")
    tau = complex(descriptor.shapes[0].tau)
    if tau.imag < 0:
        tau = -tau      # lattice representative in the upper half plane
    if symmetric_torus_test(tau) != "asymmetric":
        raise TubeError("cusp torus is symmetric; the argument needs "
                        "an asymmetric cusp")
    opts = opts or SolverOptions()
    sols = [solve_filling(descriptor, c, opts) for c in (coeff_a, coeff_b)]
    lams, radii, moduli, dists = [], [], [], []
    cusp_reduced, _, _ = reduce_modulus(tau)
    for sol in sols:
        lam = core_complex_length(sol.log_t[0], convention)
        R = radius_from_volume(lam, cusp_volume)
        reduced, _, _ = reduce_modulus(
            boundary_modulus(TubeSpec(lam, R)).tau)
        lams.append(lam)
        radii.append(R)
        moduli.append(reduced.tau)
        dists.append(abs(reduced.tau - cusp_reduced.tau))
    return RigidityReplay(
        slopes=(coeff_a.pairs[0], coeff_b.pairs[0]),
        lambdas=tuple(lams), radii=tuple(radii),
        boundary_moduli=tuple(moduli), cusp_modulus=cusp_reduced.tau,
        holonomies_agree=abs(lams[0] - lams[1]) <= tol,
        moduli_agree=abs(moduli[0] - moduli[1]) <= tol,
        moduli_vs_cusp=tuple(dists),
        slopes_equal=coeff_a.pairs[0] == coeff_b.pairs[0])
