"""Dehn filling equation solver in the log chart.

Solves p_i u_i + q_i v_i(u) = 2 pi i by Newton iteration from the
closed-form linear guess, extracts the core holonomies via a Bezout
pair, and runs the coefficient scans behind the rigidity checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .numerics import cexp, solve_linear, two_pi_i
from .series import v_series


class SolverError(RuntimeError):
    pass


class EllipticSolutionError(SolverError):
    """The solved holonomy sits on the unit circle (outside the chart)."""


def _gcd(a, b):
    return math.gcd(abs(a), abs(b))


@dataclass(frozen=True)
class FillingCoefficient:
    """One coprime (p_i, q_i) pair per cusp."""
    pairs: tuple

    def __post_init__(self):
        for p, q in self.pairs:
            if (p, q) == (0, 0):
                raise ValueError("(0, 0) is not a filling coefficient")
            if _gcd(p, q) != 1:
                raise ValueError(f"({p}, {q}) is not coprime")

    @classmethod
    def parse(cls, text):
        """Parse "7/3" or "7/3,5/2" (one slope per cusp)."""
        pairs = []
        for chunk in text.split(","):
            p_str, sep, q_str = chunk.strip().partition("/")
            if not sep:
                raise ValueError(f"slope {chunk!r} is not of the form p/q")
            pairs.append((int(p_str), int(q_str)))
        return cls(tuple(pairs))

    def norms(self):
        return tuple(abs(p) + abs(q) for p, q in self.pairs)

    def __str__(self):
        return ",".join(f"{p}/{q}" for p, q in self.pairs)


def bezout_pair(p, q):
    """(r, s) with p*r - q*s = 1, |s| minimal, ties broken toward s >= 0."""
    if _gcd(p, q) != 1:
        raise ValueError(f"({p}, {q}) not coprime")
    if p == 0:
        # -q*s = 1 forces s; r is free, pick 0
        return 0, -q  # q = +-1 so s = -q satisfies -q*s = -q*(-q) = ... see below
    g, x, y = _egcd(p, q)
    if g < 0:
        g, x, y = -g, -x, -y
    # p*x + q*y = 1  ->  r = x, s = -y; shift by (q, p) to minimize |s|
    r, s = x, -y
    k = round(-s / p)
    best = None
    for kk in (k - 1, k, k + 1):
        cand_r, cand_s = r + q * kk, s + p * kk
        key = (abs(cand_s), 0 if cand_s >= 0 else 1)
        if best is None or key < best[0]:
            best = (key, cand_r, cand_s)
    return best[1], best[2]


def _egcd(a, b):
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_x, x = x, old_x - qt * x
        old_y, y = y, old_y - qt * y
    return old_r, old_x, old_y


@dataclass
class SolverOptions:
    tol: float = 1e-12
    max_iter: int = 50
    min_norm: int = 5
    elliptic_tol: float = 1e-10
    max_halvings: int = 8


@dataclass
class FillingSolution:
    coeff: FillingCoefficient
    u: list
    v: list
    log_t: list
    t: list
    bezout: list
    inverted: list          # per-cusp flag: t was replaced by 1/t
    residual: float
    iterations: int

    def as_dict(self):
        def pair(z):
            return [float(z.real), float(z.imag)]
        return {
            "coeff": str(self.coeff),
            "u": [pair(z) for z in self.u],
            "v": [pair(z) for z in self.v],
            "log_t": [pair(z) for z in self.log_t],
            "t": [pair(z) for z in self.t],
            "bezout": [list(b) for b in self.bezout],
            "inverted": list(self.inverted),
            "residual": float(self.residual),
            "iterations": self.iterations,
        }


def _newton(v_list, jac, pairs, taus, tpi, opts):
    """Damped Newton on F_i(u) = p_i u_i + q_i v_i(u) - 2 pi i."""
    n = len(pairs)
    u = [tpi / (p + q * taus[i]) for i, (p, q) in enumerate(pairs)]

    def F(uu):
        return [pairs[i][0] * uu[i] + pairs[i][1] * v_list[i].evaluate(uu) - tpi
                for i in range(n)]

    fu = F(u)
    res = max(abs(z) for z in fu)
    for it in range(1, opts.max_iter + 1):
        if res <= opts.tol:
            return u, it - 1, res
        J = [[(pairs[i][0] if i == j else 0) + pairs[i][1] * jac[i][j].evaluate(u)
              for j in range(n)] for i in range(n)]
        try:
            step = solve_linear(J, [-z for z in fu])
        except ZeroDivisionError:
            raise SolverError(f"singular Jacobian at iteration {it}")
        scale = 1
        for _ in range(opts.max_halvings + 1):
            trial = [u[i] + scale * step[i] for i in range(n)]
            ftrial = F(trial)
            rtrial = max(abs(z) for z in ftrial)
            if rtrial < res or rtrial <= opts.tol:
                u, fu, res = trial, ftrial, rtrial
                break
            scale = scale / 2
        else:
            raise SolverError("Newton step failed to reduce the residual")
    if res <= opts.tol:
        return u, opts.max_iter, res
    raise SolverError(
        f"no convergence after {opts.max_iter} iterations (residual {float(res):.3e})")


def solve_filling(descriptor, coeff, opts=None):
    """Solve the filling equations for one coefficient tuple.

    Holonomies are normalized so |t_i| > 1 (inversion recorded); an error
    is raised when a holonomy lands on the unit circle within tolerance.
    """
    opts = opts or SolverOptions()
    if len(coeff.pairs) != descriptor.n:
        raise ValueError(f"{len(coeff.pairs)} slopes for {descriptor.n} cusps")
    if min(coeff.norms()) < opts.min_norm:
        raise ValueError(
            f"coefficient norm below min_norm={opts.min_norm}; "
            "the Newton basin is only guaranteed for large norms")
    if descriptor.dps is not None:
        with mpmath.workdps(descriptor.dps + 10):
            return _solve_filling_inner(descriptor, coeff, opts)
    return _solve_filling_inner(descriptor, coeff, opts)


def _solve_filling_inner(descriptor, coeff, opts):
    n = descriptor.n
    taus = descriptor.taus
    tpi = two_pi_i(taus[0])
    v_list = [v_series(descriptor.potential, i) for i in range(n)]
    jac = [[v_list[i].derivative(j) for j in range(n)] for i in range(n)]
    u, iterations, res = _newton(v_list, jac, coeff.pairs, taus, tpi, opts)
    v = [v_list[i].evaluate(u) for i in range(n)]
    log_t, t, bez, inverted = [], [], [], []
    for i, (p, q) in enumerate(coeff.pairs):
        r, s = bezout_pair(p, q)
        lt = s * u[i] + r * v[i]
        ti = cexp(lt)
        inv = abs(ti) < 1
        if inv:
            lt, ti = -lt, 1 / ti
        if abs(abs(ti) - 1) < opts.elliptic_tol:
            raise EllipticSolutionError(
                f"holonomy {i} is elliptic: | |t|-1 | = {float(abs(abs(ti) - 1)):.3e}")
        log_t.append(lt)
        t.append(ti)
        bez.append((r, s))
        inverted.append(inv)
    return FillingSolution(coeff=coeff, u=u, v=v, log_t=log_t, t=t,
                           bezout=bez, inverted=inverted,
                           residual=res, iterations=iterations)


def holonomy_product(solution, exponents):
    """prod t_i**a_i, computed branch-consistently as exp(sum a_i log t_i)."""
    if len(exponents) != len(solution.log_t):
        raise ValueError("exponent vector has wrong length")
    acc = 0 * solution.log_t[0]
    for a, lt in zip(exponents, solution.log_t):
        acc = acc + a * lt
    return cexp(acc)


# ----------------------------------------------------------------------
# coefficient scans


def enumerate_slopes(n_min, n_max):
    """All coprime slopes p/q with n_min <= |p|+|q| <= n_max.

    Canonical representatives: q > 0 with any sign of p, or (1, 0).
    Sorted lexicographically for deterministic output.
    """
    if n_min > n_max:
        raise ValueError("empty norm range")
    slopes = []
    if n_min <= 1 <= n_max:
        slopes.append((1, 0))
    for q in range(1, n_max + 1):
        for p in range(-(n_max - q), n_max - q + 1):
            if abs(p) + q < n_min:
                continue
            if _gcd(p, q) == 1:
                slopes.append((p, q))
    return sorted(slopes)


def _solve_slope_1d(tau, profile, p, q, opts, tpi):
    """Newton in one variable for a separable cusp.

    profile maps the potential exponent e (even, >= 4) to its
    coefficient; v(u) = tau u + sum (e/2) c u^(e-1).
    """
    terms = [(e - 1, e * c / 2) for e, c in profile.items()]

    def v_of(u):
        return tau * u + sum(c * u ** e for e, c in terms)

    def dv_of(u):
        return tau + sum(c * e * u ** (e - 1) for e, c in terms)

    u = tpi / (p + q * tau)
    f = p * u + q * v_of(u) - tpi
    res = abs(f)
    for it in range(opts.max_iter):
        if res <= opts.tol:
            break
        step = -f / (p + q * dv_of(u))
        scale = 1
        for _ in range(opts.max_halvings + 1):
            trial = u + scale * step
            ftrial = p * trial + q * v_of(trial) - tpi
            rtrial = abs(ftrial)
            if rtrial < res or rtrial <= opts.tol:
                u, f, res = trial, ftrial, rtrial
                break
            scale = scale / 2
        else:
            raise SolverError("1d Newton stalled")
    if res > opts.tol:
        raise SolverError("1d Newton did not converge")
    v = v_of(u)
    r, s = bezout_pair(p, q)
    lt = s * u + r * v
    if lt.real < 0:
        lt = -lt
    if abs(abs(cexp(lt)) - 1) < opts.elliptic_tol:
        raise EllipticSolutionError(f"elliptic holonomy at {p}/{q}")
    return u, lt


@dataclass
class ScanReport:
    norm_range: tuple
    exponents: tuple
    collision_tol: float
    n_tuples: int
    collisions: list            # (coeff_a, coeff_b, distance)
    min_gap: float
    min_gap_pair: tuple | None
    skipped: list = field(default_factory=list)
    per_cusp_u: list = field(default_factory=list)   # [(slope, |u|)] per cusp

    def as_dict(self):
        return {
            "norm_range": list(self.norm_range),
            "exponents": list(self.exponents),
            "collision_tol": self.collision_tol,
            "n_tuples": self.n_tuples,
            "n_collisions": len(self.collisions),
            "collisions": [
                {"a": str(a), "b": str(b), "distance": float(d)}
                for a, b, d in self.collisions],
            "min_gap": float(self.min_gap),
            "min_gap_pair": ([str(c) for c in self.min_gap_pair]
                             if self.min_gap_pair else None),
            "skipped": self.skipped,
        }


def scan_products(descriptor, norm_range, exponents, collision_tol,
                  opts=None, parallelism=1):
    """Enumerate coefficient tuples, compare holonomy products.

    Reports every pair of distinct coefficients whose products lie
    within collision_tol of each other, plus the global minimum gap.
    Separable potentials (no mixed terms) use a per-cusp table and an
    outer product; general potentials fall back to full Newton solves
    per tuple.
    """
    opts = opts or SolverOptions()
    n_min, n_max = norm_range
    if n_min < opts.min_norm:
        raise ValueError(f"scan range must start at min_norm={opts.min_norm}")
    slopes = enumerate_slopes(n_min, n_max)
    if not slopes:
        raise ValueError("empty norm range")
    n = descriptor.n
    if len(exponents) != n:
        raise ValueError("exponent vector has wrong length")

    skipped = []
    if descriptor.potential.is_separable():
        products, coeffs, per_cusp_u = _scan_separable(
            descriptor, slopes, exponents, opts, skipped)
    else:
        products, coeffs, per_cusp_u = _scan_general(
            descriptor, slopes, exponents, opts, skipped, parallelism)

    collisions, min_gap, min_pair = _collision_scan(products, coeffs, collision_tol)
    return ScanReport(norm_range=tuple(norm_range), exponents=tuple(exponents),
                      collision_tol=collision_tol, n_tuples=len(products),
                      collisions=collisions, min_gap=min_gap,
                      min_gap_pair=min_pair, skipped=skipped,
                      per_cusp_u=per_cusp_u)


def _scan_separable(descriptor, slopes, exponents, opts, skipped):
    tpi = 2j * math.pi
    factor_tables = []
    slope_tables = []
    per_cusp_u = []
    for i in range(descriptor.n):
        tau = complex(descriptor.taus[i])
        profile = {e: complex(c) for e, c in
                   descriptor.potential.single_variable_profile(i).items()}
        vals, kept, us = [], [], []
        for p, q in slopes:
            try:
                u, lt = _solve_slope_1d(tau, profile, p, q, opts, tpi)
            except SolverError as exc:
                skipped.append({"cusp": i, "slope": f"{p}/{q}", "reason": str(exc)})
                continue
            vals.append(cexp(exponents[i] * lt))
            kept.append((p, q))
            us.append(abs(u))
        factor_tables.append(np.array(vals, dtype=complex))
        slope_tables.append(kept)
        per_cusp_u.append(list(zip(kept, us)))

    prod = factor_tables[0]
    for tab in factor_tables[1:]:
        prod = np.multiply.outer(prod, tab).ravel()
    sizes = [len(t) for t in slope_tables]

    def coeff_of(flat):
        idx = []
        for size in reversed(sizes):
            flat, k = divmod(flat, size)
            idx.append(k)
        idx.reverse()
        return FillingCoefficient(tuple(slope_tables[i][k]
                                        for i, k in enumerate(idx)))

    return prod, coeff_of, per_cusp_u


def _scan_general(descriptor, slopes, exponents, opts, skipped, parallelism):
    tuples = list(itertools.product(slopes, repeat=descriptor.n))
    prods = []
    coeffs = []
    per_cusp_u = [[] for _ in range(descriptor.n)]
    for pairs in tuples:
        coeff = FillingCoefficient(pairs)
        try:
            sol = solve_filling(descriptor, coeff, opts)
        except SolverError as exc:
            skipped.append({"coeff": str(coeff), "reason": str(exc)})
            continue
        prods.append(complex(holonomy_product(sol, exponents)))
        coeffs.append(coeff)
        for i in range(descriptor.n):
            per_cusp_u[i].append((pairs[i], float(abs(sol.u[i]))))
    arr = np.array(prods, dtype=complex)

    def coeff_of(flat):
        return coeffs[flat]

    return arr, coeff_of, per_cusp_u


def _collision_scan(products, coeff_of, tol):
    """Near-pair search on values sorted by real part."""
    n = len(products)
    if n < 2:
        return [], math.inf, None
    order = np.lexsort((products.imag, products.real))
    vals = products[order].tolist()
    flat = order.tolist()
    min_gap = math.inf
    min_pair_idx = None
    collisions = []
    for i in range(n - 1):
        vi = vals[i]
        j = i + 1
        window = max(min_gap, tol)
        while j < n and vals[j].real - vi.real < window:
            d = abs(vals[j] - vi)
            if d < tol:
                collisions.append((flat[i], flat[j], d))
            if d < min_gap:
                min_gap = d
                min_pair_idx = (flat[i], flat[j])
                window = max(min_gap, tol)
            j += 1
    out = [(coeff_of(min(a, b)), coeff_of(max(a, b)), d)
           for a, b, d in collisions]
    out.sort(key=lambda item: (str(item[0]), str(item[1])))
    pair = ((coeff_of(min_pair_idx[0]), coeff_of(min_pair_idx[1]))
            if min_pair_idx else None)
    return out, min_gap, pair
