"""Input data model for a cusped manifold's analytic Dehn-filling chart.

A descriptor bundles the cusp shapes, the truncated even potential and
(optionally) the complex volume.  Files carry coefficients as decimal
strings; exactness lives in the file, the runtime parses them at a
configured binary precision (doubles by default, mpmath at ``dps``
decimal digits on request).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import mpmath

from .numerics import parse_complex


class DescriptorError(ValueError):
    """Raised when a descriptor file violates the chart invariants."""


@dataclass(frozen=True)
class CuspShape:
    """Modulus of a cusp torus with respect to the chosen longitude/meridian."""
    tau: complex

    def __post_init__(self):
        if self.tau.imag == 0:
            raise DescriptorError("cusp shape must not be real (Im tau = 0)")


@dataclass(frozen=True)
class NZPotential:
    """Truncated even potential: quadratic part plus higher even terms.

    quad[j] is the coefficient of u_j**2 (the cusp shape tau_j); higher
    maps an all-even multi-index of total degree in [4, D] to its
    coefficient.
    """
    n: int
    degree_cutoff: int
    quad: tuple
    higher: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise DescriptorError("potential needs at least one variable")
        if self.degree_cutoff < 2 or self.degree_cutoff % 2 != 0:
            raise DescriptorError(
                f"degree cutoff must be an even integer >= 2, got {self.degree_cutoff}")
        if len(self.quad) != self.n:
            raise DescriptorError("quadratic part has wrong length")
        for idx, c in self.higher.items():
            if len(idx) != self.n:
                raise DescriptorError(f"multi-index {idx} has wrong arity")
            if any(e < 0 for e in idx):
                raise DescriptorError(f"negative exponent in multi-index {idx}")
            if any(e % 2 != 0 for e in idx):
                raise DescriptorError(f"odd exponent in even potential: {idx}")
            total = sum(idx)
            if total % 2 != 0 or not 4 <= total <= self.degree_cutoff:
                raise DescriptorError(
                    f"multi-index {idx} has total degree {total}, "
                    f"expected even degree in [4, {self.degree_cutoff}]")

    def is_separable(self):
        """True when no higher term mixes two variables."""
        return all(sum(1 for e in idx if e > 0) <= 1 for idx in self.higher)

    def single_variable_profile(self, j):
        """Map exponent -> coefficient for terms supported on variable j only."""
        out = {}
        for idx, c in self.higher.items():
            if all(e == 0 for k, e in enumerate(idx) if k != j) and idx[j] > 0:
                out[idx[j]] = c
        return out

    def is_product_of_identical(self, tol=1e-13):
        """True when the potential is a sum of identical single-variable copies."""
        if not self.is_separable():
            return False
        if self.n >= 2:
            t0 = self.quad[0]
            if any(abs(t - t0) > tol for t in self.quad[1:]):
                return False
        profiles = [self.single_variable_profile(j) for j in range(self.n)]
        p0 = profiles[0]
        for p in profiles[1:]:
            if set(p) != set(p0):
                return False
            if any(abs(p[e] - p0[e]) > tol for e in p0):
                return False
        return True


@dataclass(frozen=True)
class ManifoldDescriptor:
    name: str
    n: int
    shapes: tuple
    potential: NZPotential
    vol_complex: complex | None = None
    provenance: str = ""
    dps: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise DescriptorError("cusp count must be positive")
        if len(self.shapes) != self.n:
            raise DescriptorError(
                f"{len(self.shapes)} shapes for {self.n} cusps")
        if self.potential.n != self.n:
            raise DescriptorError("potential dimension differs from cusp count")
        for j, shape in enumerate(self.shapes):
            if self.potential.quad[j] != shape.tau:
                raise DescriptorError(
                    f"quadratic coefficient {j} differs from cusp shape {j}")
        if self.vol_complex is not None and not self.vol_complex.real > 0:
            raise DescriptorError("complex volume must have positive real part")

    @property
    def taus(self):
        return tuple(s.tau for s in self.shapes)


def descriptor_from_dict(data, name_hint="<dict>", dps=None):
    """Build and validate a descriptor from parsed JSON."""
    try:
        name = data["name"]
        cusps = int(data["cusps"])
        raw_shapes = data["shapes"]
        pot = data["potential"]
        cutoff = int(pot["degree_cutoff"])
        raw_terms = pot.get("terms", [])
    except (KeyError, TypeError) as exc:
        raise DescriptorError(f"{name_hint}: missing or malformed field: {exc}")

    shapes = tuple(CuspShape(parse_complex(p, dps)) for p in raw_shapes)
    higher = {}
    for term in raw_terms:
        idx = tuple(int(e) for e in term["index"])
        higher[idx] = parse_complex(term["coeff"], dps)
    quad = tuple(s.tau for s in shapes)
    potential = NZPotential(n=cusps, degree_cutoff=cutoff, quad=quad, higher=higher)
    vol = data.get("vol_complex")
    vol_complex = parse_complex(vol, dps) if vol is not None else None
    return ManifoldDescriptor(
        name=name, n=cusps, shapes=shapes, potential=potential,
        vol_complex=vol_complex, provenance=data.get("provenance", ""),
        dps=dps)


def load_manifold(path, dps=None):
    """Load and validate a manifold descriptor JSON file."""
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"{path}: not valid JSON: {exc}")
    return descriptor_from_dict(data, name_hint=str(path), dps=dps)


def _num_str(x, dps=None):
    if isinstance(x, mpmath.mpf):
        # a few guard digits so reparsing at dps reproduces the same mpf
        return mpmath.nstr(x, (dps or mpmath.mp.dps) + 5, strip_zeros=False)
    return repr(float(x))


def serialize_manifold(descriptor):
    """Descriptor back to its JSON dict form.

    Coefficients are written as decimal strings that round-trip exactly
    at the precision they were parsed at.
    """
    def pair(z):
        return [_num_str(z.real, descriptor.dps), _num_str(z.imag, descriptor.dps)]

    terms = [{"index": list(idx), "coeff": pair(c)}
             for idx, c in sorted(descriptor.potential.higher.items())]
    return {
        "name": descriptor.name,
        "cusps": descriptor.n,
        "shapes": [pair(s.tau) for s in descriptor.shapes],
        "vol_complex": (pair(descriptor.vol_complex)
                        if descriptor.vol_complex is not None else None),
        "potential": {
            "degree_cutoff": descriptor.potential.degree_cutoff,
            "terms": terms,
        },
        "provenance": descriptor.provenance,
    }


def synthesize_product(descriptor, copies):
    """n-fold product of a 1-cusp descriptor in disjoint variables.

    The potential becomes Phi(u_1) + ... + Phi(u_copies); every cusp
    carries the input shape.  Complex volume scales additively.
    """
    if descriptor.n != 1:
        raise DescriptorError("product synthesis needs a 1-cusp descriptor")
    if copies < 1:
        raise DescriptorError("copies must be a positive integer")
    if copies == 1:
        return descriptor
    tau = descriptor.shapes[0].tau
    shapes = tuple(CuspShape(tau) for _ in range(copies))
    higher = {}
    for idx, c in descriptor.potential.higher.items():
        e = idx[0]
        for k in range(copies):
            new_idx = tuple(e if j == k else 0 for j in range(copies))
            higher[new_idx] = c
    potential = NZPotential(n=copies,
                            degree_cutoff=descriptor.potential.degree_cutoff,
                            quad=tuple(tau for _ in range(copies)),
                            higher=higher)
    vol = descriptor.vol_complex
    return ManifoldDescriptor(
        name=f"{descriptor.name}^({copies})", n=copies, shapes=shapes,
        potential=potential,
        vol_complex=(vol * copies if vol is not None else None),
        provenance=f"product of {copies} copies of {descriptor.name}",
        dps=descriptor.dps)
