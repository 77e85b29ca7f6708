"""Multivariate truncated power series arithmetic.

A series is a dict from exponent multi-index (a tuple of non-negative
ints) to a complex coefficient, together with a total-degree cutoff D.
Terms above the cutoff are dropped; binary operations carry the min of
the operand cutoffs.  This is the single numeric kernel behind the
potential, the v_i series, linear-slice substitution and the anomaly
series criterion.
"""

from __future__ import annotations


class SeriesError(ValueError):
    pass


class TruncatedSeries:
    """Polynomial in n variables truncated at total degree D."""

    __slots__ = ("n", "D", "terms")

    def __init__(self, n, D, terms=None):
        if n < 0 or D < 0:
            raise SeriesError("n and D must be non-negative")
        self.n = n
        self.D = D
        self.terms = {}
        if terms:
            for idx, c in terms.items():
                idx = tuple(idx)
                if len(idx) != n:
                    raise SeriesError(f"index {idx} has wrong arity, expected {n}")
                if any(e < 0 for e in idx):
                    raise SeriesError(f"negative exponent in index {idx}")
                if sum(idx) > D:
                    continue
                if c != 0:
                    self.terms[idx] = self.terms.get(idx, 0) + c

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, n, D):
        return cls(n, D)

    @classmethod
    def constant(cls, value, n, D):
        return cls(n, D, {(0,) * n: value})

    @classmethod
    def variable(cls, i, n, D, coeff=1):
        idx = tuple(1 if j == i else 0 for j in range(n))
        return cls(n, D, {idx: coeff})

    # -- ring operations ---------------------------------------------

    def _check_compatible(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected TruncatedSeries")
        if self.n != other.n:
            raise SeriesError("variable count mismatch")

    def __add__(self, other):
        self._check_compatible(other)
        D = min(self.D, other.D)
        out = dict(self.terms)
        for idx, c in other.terms.items():
            out[idx] = out.get(idx, 0) + c
        return TruncatedSeries(self.n, D, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return TruncatedSeries(self.n, self.D, {i: -c for i, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check_compatible(other)
        D = min(self.D, other.D)
        out = {}
        for ia, ca in self.terms.items():
            da = sum(ia)
            for ib, cb in other.terms.items():
                if da + sum(ib) > D:
                    continue
                idx = tuple(a + b for a, b in zip(ia, ib))
                out[idx] = out.get(idx, 0) + ca * cb
        return TruncatedSeries(self.n, D, out)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, factor):
        if factor == 0:
            return TruncatedSeries.zero(self.n, self.D)
        return TruncatedSeries(self.n, self.D,
                               {i: factor * c for i, c in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, TruncatedSeries) and self.n == other.n
                and self.D == other.D and self.terms == other.terms)

    def __repr__(self):
        return f"TruncatedSeries(n={self.n}, D={self.D}, terms={self.terms!r})"

    # -- calculus ----------------------------------------------------

    def derivative(self, i):
        """d/du_i; the cutoff drops by one since the top degree is exact."""
        if not 0 <= i < self.n:
            raise SeriesError(f"variable index {i} out of range")
        out = {}
        for idx, c in self.terms.items():
            e = idx[i]
            if e == 0:
                continue
            down = idx[:i] + (e - 1,) + idx[i + 1:]
            out[down] = out.get(down, 0) + e * c
        return TruncatedSeries(self.n, max(self.D - 1, 0), out)

    # -- evaluation and substitution ---------------------------------

    def evaluate(self, point):
        """Evaluate the truncated polynomial at a point (length-n vector)."""
        if len(point) != self.n:
            raise SeriesError(f"point has length {len(point)}, expected {self.n}")
        # cache powers of each coordinate up to the maximal exponent used
        maxexp = [0] * self.n
        for idx in self.terms:
            for j, e in enumerate(idx):
                if e > maxexp[j]:
                    maxexp[j] = e
        powers = []
        for j in range(self.n):
            col = [1]
            for _ in range(maxexp[j]):
                col.append(col[-1] * point[j])
            powers.append(col)
        total = 0
        for idx, c in sorted(self.terms.items()):
            mono = c
            for j, e in enumerate(idx):
                if e:
                    mono = mono * powers[j][e]
            total = total + mono
        return total

    def substitute_linear(self, i, combo):
        """Replace u_i by the linear form sum_j combo[j] * (remaining vars).

        Returns a series in n-1 variables with the same cutoff D.  combo
        has one entry per remaining variable, in their original order
        with variable i removed.
        """
        if not 0 <= i < self.n:
            raise SeriesError(f"variable index {i} out of range")
        m = self.n - 1
        if len(combo) != m:
            raise SeriesError(f"combo has length {len(combo)}, expected {m}")
        linear = TruncatedSeries(m, self.D,
                                 {tuple(1 if k == j else 0 for k in range(m)): combo[j]
                                  for j in range(m) if combo[j] != 0})
        # powers of the linear form, computed on demand
        pow_cache = {0: TruncatedSeries.constant(1, m, self.D)}

        def linear_pow(e):
            if e not in pow_cache:
                pow_cache[e] = linear_pow(e - 1) * linear
            return pow_cache[e]

        out = TruncatedSeries.zero(m, self.D)
        for idx, c in self.terms.items():
            rest = idx[:i] + idx[i + 1:]
            base = TruncatedSeries(m, self.D, {rest: c})
            out = out + base * linear_pow(idx[i])
        return out


def phi_series(potential):
    """The even potential itself as a truncated series of degree D."""
    n = potential.n
    terms = {}
    for j, tau in enumerate(potential.quad):
        idx = tuple(2 if k == j else 0 for k in range(n))
        terms[idx] = terms.get(idx, 0) + tau
    for idx, c in potential.higher.items():
        terms[idx] = terms.get(idx, 0) + c
    return TruncatedSeries(n, potential.degree_cutoff, terms)


def v_series(potential, i):
    """Longitude log-holonomy series: half the i-th partial of the potential.

    The leading term is tau_i * u_i; every stored index has an odd entry
    at position i and even entries elsewhere.
    """
    n = potential.n
    if not 0 <= i < n:
        raise SeriesError(f"cusp index {i} out of range for {n} cusps")
    terms = {}
    e_i = tuple(1 if k == i else 0 for k in range(n))
    terms[e_i] = potential.quad[i]
    for idx, c in potential.higher.items():
        e = idx[i]
        if e == 0:
            continue
        down = idx[:i] + (e - 1,) + idx[i + 1:]
        terms[down] = terms.get(down, 0) + e * c / 2
    return TruncatedSeries(n, max(potential.degree_cutoff - 1, 1), terms)
