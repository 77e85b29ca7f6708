"""Integer-relation detection and algebraic-number utilities.

Lattice reduction over the standard embedding decides (heuristically)
whether a list of complex values admits a small integer relation modulo
a period lattice.  On top of that sit the multiplicative-independence,
pseudo-volume-independence, cusp-shape symmetry and quadraticity tests,
and Weil heights via the Mahler-measure formula.

"No relation" results are heuristic certificates: they state that no
relation with coefficients up to the bound survived at the working
precision, not a proof of independence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath

from .lll import lll_reduce


class RelationError(ValueError):
    pass


@dataclass
class RelationQuery:
    values: list
    periods: list = field(default_factory=list)
    coeff_bound: int = 10 ** 4
    precision: int = 50

    def __post_init__(self):
        if self.coeff_bound < 1:
            raise RelationError("coefficient bound must be >= 1")
        if self.precision < 30:
            raise RelationError("precision below 30 digits is meaningless here")


@dataclass
class RelationResult:
    found: bool
    coefficients: list          # integer coefficients on the values
    period_coefficients: list   # integer coefficients on the periods
    residual: float
    certificate: str

    def as_dict(self):
        return {
            "found": self.found,
            "coefficients": list(self.coefficients),
            "period_coefficients": list(self.period_coefficients),
            "residual": float(self.residual),
            "certificate": self.certificate,
        }


def _to_mpc(z, dps):
    with mpmath.workdps(dps):
        if isinstance(z, (mpmath.mpf, mpmath.mpc)):
            return mpmath.mpc(z)
        return mpmath.mpc(z.real, z.imag)


def find_integer_relation(query):
    """Search for integers a, b with |sum a_i v_i + sum b_j p_j| tiny.

    Standard embedding: identity block plus the real and imaginary parts
    of each value scaled by 10^precision, reduced with LLL.  A candidate
    is accepted only if its re-evaluated residual is below
    10^(-precision/2), its value-part is nonzero, and its coefficients
    respect the bound.
    """
    prec = query.precision
    work_dps = prec + 20
    xs = [_to_mpc(z, work_dps) for z in list(query.values) + list(query.periods)]
    m = len(xs)
    nvals = len(query.values)
    if nvals == 0 or all(abs(x) == 0 for x in xs[:nvals]):
        raise RelationError("degenerate query: all values are zero")

    with mpmath.workdps(work_dps):
        scale = mpmath.mpf(10) ** prec
        rows = []
        for k, x in enumerate(xs):
            row = [0] * m
            row[k] = 1
            row.append(int(mpmath.nint(scale * x.real)))
            row.append(int(mpmath.nint(scale * x.imag)))
            rows.append(row)
        reduced = lll_reduce(rows)

        threshold = mpmath.mpf(10) ** (-prec / 2)
        best = None
        for row in reduced:
            a = row[:nvals]
            bcoef = row[nvals:m]
            if all(c == 0 for c in a):
                continue
            if max(abs(c) for c in row[:m]) > query.coeff_bound:
                continue
            resid = abs(sum(c * x for c, x in zip(row[:m], xs)))
            if resid > threshold:
                continue
            key = (resid, sum(c * c for c in row[:m]))
            if best is None or key < best[0]:
                best = (key, a, bcoef, resid)

        if best is None:
            return RelationResult(
                found=False, coefficients=[], period_coefficients=[],
                residual=math.inf,
                certificate=(f"no relation up to bound {query.coeff_bound} "
                             f"at precision {prec} (heuristic)"))
        _, a, bcoef, resid = best
        # sign normalization: first nonzero value-coefficient positive
        lead = next(c for c in a if c != 0)
        if lead < 0:
            a = [-c for c in a]
            bcoef = [-c for c in bcoef]
        return RelationResult(
            found=True, coefficients=list(a), period_coefficients=list(bcoef),
            residual=float(resid), certificate="relation found")


def multiplicative_independence(solution, bound=10 ** 4, precision=50):
    """Integer relation among {log t_i} modulo 2 pi i.

    A found relation witnesses multiplicative dependence of the
    holonomies; absence is a heuristic certificate.
    """
    with mpmath.workdps(precision + 20):
        period = 2j * (+mpmath.pi)
    query = RelationQuery(values=list(solution.log_t), periods=[period],
                          coeff_bound=bound, precision=precision)
    return find_integer_relation(query)


@dataclass
class PvolIndependenceResult:
    relation: RelationResult
    all_nonzero: bool

    def as_dict(self):
        out = self.relation.as_dict()
        out["all_nonzero"] = self.all_nonzero
        return out


def pvol_independence(unreduced_pvols, bound=10 ** 3, precision=50):
    """Integer relation among unreduced pseudo volumes modulo i pi^2.

    Only a relation with every value-coefficient nonzero counts against
    the rational-independence statement; partial relations are reported
    with all_nonzero=False.
    """
    with mpmath.workdps(precision + 20):
        period = 1j * (+mpmath.pi) ** 2
    query = RelationQuery(values=list(unreduced_pvols), periods=[period],
                          coeff_bound=bound, precision=precision)
    rel = find_integer_relation(query)
    all_nonzero = rel.found and all(c != 0 for c in rel.coefficients)
    return PvolIndependenceResult(relation=rel, all_nonzero=all_nonzero)


@dataclass
class SymmetryResult:
    relation: RelationResult
    verdict: str
    mobius: tuple | None        # (a, b, c, d) with tau_i = (a tau_j + b)/(c tau_j + d)

    def as_dict(self):
        out = self.relation.as_dict()
        out["verdict"] = self.verdict
        out["mobius"] = list(self.mobius) if self.mobius else None
        return out


def cusp_symmetry_test(tau_i, tau_j, bound=10 ** 3, precision=50):
    """Search for an integer Mobius map sending tau_j to tau_i.

    tau_i = (a tau_j + b)/(c tau_j + d) is equivalent to the vanishing
    of a*tau_j + b - c*tau_i*tau_j - d*tau_i, an integer relation on
    {tau_j, 1, tau_i*tau_j, tau_i}.
    """
    if tau_i.imag == 0 or tau_j.imag == 0:
        raise RelationError("cusp shapes must be non-real")
    ti = _to_mpc(tau_i, precision + 20)
    tj = _to_mpc(tau_j, precision + 20)
    with mpmath.workdps(precision + 20):
        values = [tj, mpmath.mpc(1), ti * tj, ti]
    query = RelationQuery(values=values, periods=[],
                          coeff_bound=bound, precision=precision)
    rel = find_integer_relation(query)
    if not rel.found:
        return SymmetryResult(relation=rel,
                              verdict=f"no symmetry up to bound {bound}",
                              mobius=None)
    w = rel.coefficients
    mobius = (w[0], w[1], -w[2], -w[3])
    if mobius[0] < 0 or (mobius[0] == 0 and mobius[1] < 0):
        mobius = tuple(-x for x in mobius)
    return SymmetryResult(relation=rel, verdict="symmetric candidate",
                          mobius=mobius)


def quadraticity_test(tau, bound=10 ** 3, precision=50):
    """Integer relation on {1, tau, tau^2}; detects quadratic shapes."""
    t = _to_mpc(tau, precision + 20)
    with mpmath.workdps(precision + 20):
        values = [mpmath.mpc(1), t, t * t]
    query = RelationQuery(values=values, periods=[],
                          coeff_bound=bound, precision=precision)
    rel = find_integer_relation(query)
    verdict = ("quadratic" if rel.found
               else f"non-quadratic up to bound {bound}")
    return rel, verdict


# ----------------------------------------------------------------------
# heights


@dataclass(frozen=True)
class AlgebraicNumber:
    """Algebraic number given by its (asserted irreducible) minimal polynomial.

    minpoly holds integer coefficients in descending order, leading
    first, content 1; root is a complex approximation selecting which
    conjugate is meant.
    """
    minpoly: tuple
    root: complex

    def __post_init__(self):
        if len(self.minpoly) < 2:
            raise RelationError("minimal polynomial must have degree >= 1")
        if self.minpoly[0] == 0:
            raise RelationError("leading coefficient must be nonzero")
        if any(int(c) != c for c in self.minpoly):
            raise RelationError("minimal polynomial must have integer coefficients")
        content = 0
        for c in self.minpoly:
            content = math.gcd(content, abs(int(c)))
        if content != 1:
            raise RelationError(f"minimal polynomial has content {content}")

    @property
    def degree(self):
        return len(self.minpoly) - 1


def height(alpha, dps=50):
    """Weil height via the Mahler measure of the minimal polynomial:

        h = (1/d) * (log|lead| + sum_k log max(1, |root_k|))

    over all complex roots; equivalent to the sum-over-places definition
    for a number presented by its minimal polynomial.
    """
    coeffs = [int(c) for c in alpha.minpoly]
    d = alpha.degree
    with mpmath.workdps(dps + 10):
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=80)
        except mpmath.libmp.NoConvergence as exc:
            raise RelationError(f"root finding failed: {exc}")
        if alpha.root is not None:
            target = mpmath.mpc(complex(alpha.root))
            resid = abs(mpmath.polyval(coeffs, target))
            scale = max(abs(c) for c in coeffs) * max(1.0, abs(target)) ** d
            if float(resid / scale) > 1e-6:
                raise RelationError(
                    "root approximation does not satisfy the minimal polynomial")
        acc = mpmath.log(abs(coeffs[0]))
        for r in roots:
            ar = abs(r)
            if ar > 1:
                acc += mpmath.log(ar)
        return float(acc / d)


def is_root_of_unity(alpha, max_order=200, dps=50):
    """Numeric Kronecker check: alpha**n == 1 for some n <= max_order.

    The stored root approximation is first polished against the minimal
    polynomial, so a double-precision seed still supports the tight
    power test.
    """
    coeffs = [int(c) for c in alpha.minpoly]
    with mpmath.workdps(dps + 10):
        z = mpmath.mpc(complex(alpha.root))
        try:
            z = mpmath.findroot(lambda w: mpmath.polyval(coeffs, w), z)
        except (ValueError, ZeroDivisionError):
            pass    # keep the seed; the tolerance below still guards it
        w = mpmath.mpc(1)
        tol = mpmath.mpf(10) ** (-dps // 2)
        for _ in range(max_order):
            w = w * z
            if abs(w - 1) < tol:
                return True
    return False


def northcott_filter(points, hbound, dbound):
    """Points (height, degree) within both closed bounds."""
    return [pt for pt in points if pt[0] <= hbound and pt[1] <= dbound]
