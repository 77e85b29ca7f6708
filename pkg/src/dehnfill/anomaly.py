"""Exact integer/cusp-shape linear algebra for anomalous subgroups.

The 2x4 classification lemmas are decided by exact integer conditions
(floating point only cross-checks them); subgroup lattices through a
coset are pushed through the identity by the constructive normalization;
the higher-order series criterion separates the surviving slope
pairings on product manifolds.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .series import TruncatedSeries


class AnomalyError(ValueError):
    pass


# ----------------------------------------------------------------------
# 2x4 rank classification


class Form(enum.Enum):
    RANK2 = "Rank2"
    PROPORTIONAL_BLOCKS = "ProportionalBlocks"
    LEFT_BLOCK_ZERO = "LeftBlockZero"      # columns 1-2 vanish
    RIGHT_BLOCK_ZERO = "RightBlockZero"    # columns 3-4 vanish


@dataclass(frozen=True)
class LemmaClassification:
    tag: Form
    witness: Fraction | None = None    # proportionality factor m, when applicable

    def as_dict(self):
        out = {"tag": self.tag.value}
        if self.witness is not None:
            out["witness"] = str(self.witness)
        return out


def _rank2_over_q(matrix):
    (a1, b1, c1, d1), (a2, b2, c2, d2) = matrix
    row1 = (a1, b1, c1, d1)
    row2 = (a2, b2, c2, d2)
    if all(x == 0 for x in row1) or all(x == 0 for x in row2):
        return False
    # rank 2 iff some 2x2 minor is nonzero
    return any(row1[i] * row2[j] - row1[j] * row2[i] != 0
               for i in range(4) for j in range(i + 1, 4))


def classify_2x4_same_shape(matrix, tau=None):
    """Rank of [[a+b*tau, c+d*tau], ...] for a single non-quadratic tau.

    Decided by the exact integer conditions equivalent to the vanishing
    of the determinant as a polynomial in tau; tau itself is only needed
    by callers for cross-checks.
    """
    if not _rank2_over_q(matrix):
        raise AnomalyError("input matrix must have rank 2 over Q")
    (a1, b1, c1, d1), (a2, b2, c2, d2) = matrix
    det_const = a1 * c2 - a2 * c1
    det_quad = b1 * d2 - b2 * d1
    det_lin = (b1 * c2 + a1 * d2) - (a2 * d1 + b2 * c1)
    if det_const != 0 or det_quad != 0 or det_lin != 0:
        return LemmaClassification(Form.RANK2)
    left = ((a1, b1), (a2, b2))
    right = ((c1, d1), (c2, d2))
    if all(x == 0 for row in left for x in row):
        return LemmaClassification(Form.LEFT_BLOCK_ZERO)
    if all(x == 0 for row in right for x in row):
        return LemmaClassification(Form.PROPORTIONAL_BLOCKS, Fraction(0))
    # right block = m * left block for a single rational m
    m = None
    for lv, rv in (((a1, b1, a2, b2)[k], (c1, d1, c2, d2)[k]) for k in range(4)):
        if lv == 0:
            if rv != 0:
                raise AnomalyError("rank-1 matrix fits no lemma form; "
                                   "hypotheses violated")
            continue
        ratio = Fraction(rv, lv)
        if m is None:
            m = ratio
        elif ratio != m:
            raise AnomalyError("rank-1 matrix fits no lemma form; "
                               "hypotheses violated")
    # m is not None here: the left block is nonzero
    left_flat = (a1, b1, a2, b2)
    right_flat = (c1, d1, c2, d2)
    if any(m * lv != rv for lv, rv in zip(left_flat, right_flat)):
        raise AnomalyError("rank-1 matrix fits no lemma form")
    return LemmaClassification(Form.PROPORTIONAL_BLOCKS, m)


def classify_2x4_two_shapes(matrix, tau1=None, tau2=None):
    """Rank of [[a+b*tau1, c+d*tau2], ...] when 1, tau1, tau2, tau1*tau2
    are Q-linearly independent: rank 1 iff all four cross minors vanish,
    and then one of the 2-column blocks is identically zero.
    """
    if not _rank2_over_q(matrix):
        raise AnomalyError("input matrix must have rank 2 over Q")
    (a1, b1, c1, d1), (a2, b2, c2, d2) = matrix
    minors = (a1 * c2 - c1 * a2, b1 * c2 - c1 * b2,
              a1 * d2 - d1 * a2, b1 * d2 - d1 * b2)
    if any(m != 0 for m in minors):
        return LemmaClassification(Form.RANK2)
    if a1 == b1 == a2 == b2 == 0:
        return LemmaClassification(Form.LEFT_BLOCK_ZERO)
    if c1 == d1 == c2 == d2 == 0:
        return LemmaClassification(Form.RIGHT_BLOCK_ZERO)
    raise AnomalyError("rank-1 matrix fits no lemma form; "
                       "independence hypothesis violated")


def complex_block_rank(matrix, tau1, tau2, rel_tol=1e-9):
    """Numeric rank of the 2x2 matrix [[a+b*t1, c+d*t2], ...].

    Cross-check companion for the exact classifiers.
    """
    (a1, b1, c1, d1), (a2, b2, c2, d2) = matrix
    M = np.array([[a1 + b1 * tau1, c1 + d1 * tau2],
                  [a2 + b2 * tau1, c2 + d2 * tau2]], dtype=complex)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


# ----------------------------------------------------------------------
# subgroup lattices


def rational_rank(rows):
    """Exact row rank over Q by fraction Gaussian elimination."""
    mat = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        r += 1
        rank += 1
        if r == len(mat):
            break
    return rank


@dataclass(frozen=True)
class SubgroupLattice:
    """k x 2n integer exponent matrix with 2*pi*i offset multiples.

    Row i encodes M_1^{a_i1} L_1^{b_i1} ... = 1 as
    (a_i1, b_i1, ..., a_in, b_in); offsets[i] is the integer m_i on the
    right-hand side 2*pi*i*m_i of the log-chart equation.
    """
    rows: tuple
    offsets: tuple

    def __post_init__(self):
        if not self.rows:
            raise AnomalyError("lattice needs at least one row")
        width = len(self.rows[0])
        if width % 2 != 0 or width == 0:
            raise AnomalyError("row width must be a positive even number")
        if any(len(r) != width for r in self.rows):
            raise AnomalyError("ragged lattice rows")
        if len(self.offsets) != len(self.rows):
            raise AnomalyError("offsets length differs from row count")
        if rational_rank(self.rows) != len(self.rows):
            raise AnomalyError("lattice rows must have full rank over Q")

    @property
    def k(self):
        return len(self.rows)

    @property
    def n(self):
        return len(self.rows[0]) // 2


def jacobian_rank(lattice, shapes, rel_tol=1e-9):
    """Numeric rank of the k x n matrix with entries a_kj + b_kj * tau_j.

    Only defined for subgroups through the identity (all offsets zero).
    """
    if any(m != 0 for m in lattice.offsets):
        raise AnomalyError("jacobian rank needs a subgroup through the identity")
    if len(shapes) != lattice.n:
        raise AnomalyError(f"{len(shapes)} shapes for {lattice.n} cusps")
    taus = [complex(getattr(s, "tau", s)) for s in shapes]
    M = np.array([[row[2 * j] + row[2 * j + 1] * taus[j]
                   for j in range(lattice.n)] for row in lattice.rows],
                 dtype=complex)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > rel_tol * sv[0]))


@dataclass
class NormalizationReport:
    already_through_identity: bool
    dropped_row: tuple | None
    clearing_factors: list
    epsilons: list


def _clear_row(frac_row):
    """Minimal positive integer multiple turning a rational row integral."""
    denom = 1
    for x in frac_row:
        denom = denom * x.denominator // math.gcd(denom, x.denominator)
    return denom, tuple(int(x * denom) for x in frac_row)


def normalize_subgroup(lattice):
    """Push a subgroup lattice with nonzero offsets through the identity.

    Rows with offset m != 0 are divided by m (epsilon = 1); the first
    epsilon=1 row is subtracted from the others and dropped; denominators
    are cleared row-wise with the minimal positive integers.  Returns the
    codimension-(k-1) integer lattice (or the input when all offsets are
    already zero) plus a report of the construction.
    """
    eps = []
    frac_rows = []
    for row, m in zip(lattice.rows, lattice.offsets):
        if m == 0:
            eps.append(0)
            frac_rows.append(tuple(Fraction(x) for x in row))
        else:
            eps.append(1)
            frac_rows.append(tuple(Fraction(x, m) for x in row))
    if all(e == 0 for e in eps):
        report = NormalizationReport(already_through_identity=True,
                                     dropped_row=None, clearing_factors=[],
                                     epsilons=eps)
        return lattice, report

    pivot = eps.index(1)
    pivot_row = frac_rows[pivot]
    out_rows = []
    factors = []
    for i, (row, e) in enumerate(zip(frac_rows, eps)):
        if i == pivot:
            continue
        adjusted = (tuple(x - y for x, y in zip(row, pivot_row))
                    if e == 1 else row)
        if all(x == 0 for x in adjusted):
            raise AnomalyError(
                f"row {i} vanishes after normalization (degenerate input)")
        c, int_row = _clear_row(adjusted)
        factors.append(c)
        out_rows.append(int_row)
    if not out_rows:
        raise AnomalyError("normalization dropped the only row (degenerate input)")
    normalized = SubgroupLattice(rows=tuple(out_rows),
                                 offsets=tuple(0 for _ in out_rows))
    report = NormalizationReport(already_through_identity=False,
                                 dropped_row=tuple(lattice.rows[pivot]),
                                 clearing_factors=factors, epsilons=eps)
    return normalized, report


# ----------------------------------------------------------------------
# series criterion and codimension-2 containment


def anomaly_series_criterion(potential, combo, tol=1e-13):
    """Does h(-sum l_i u_i) + sum l_i h(u_i) vanish as a truncated series?

    potential must be a product of identical 1-cusp potentials with a
    nontrivial higher part; combo lists the rational l_i (one per
    variable u_2..u_n).  True exactly when at most one l_i is nonzero
    and that entry is +-1.
    """
    if not potential.is_product_of_identical():
        raise AnomalyError("potential is not a product of identical copies")
    if len(combo) != potential.n - 1:
        raise AnomalyError(
            f"combo has length {len(combo)}, expected {potential.n - 1}")
    profile = potential.single_variable_profile(0)
    if not profile:
        raise AnomalyError("product potential has no higher terms; "
                           "the criterion needs a nontrivial odd part")
    D = potential.degree_cutoff
    # odd part of v for one copy: h(u) = sum (e/2) c u^(e-1), e >= 4 even
    h_terms = {e - 1: e * c / 2 for e, c in profile.items()}
    m = len(combo)
    floats = [complex(Fraction(l)) for l in combo]
    # h(u_1) written in m+1 variables, then u_1 replaced by -sum l_i u_i
    h_in_first = TruncatedSeries(
        m + 1, D - 1,
        {(e,) + (0,) * m: c for e, c in h_terms.items()})
    expanded = h_in_first.substitute_linear(0, [-f for f in floats])
    for j, l in enumerate(floats):
        if l == 0:
            continue
        embedded = TruncatedSeries(
            m, D - 1,
            {tuple(e if k == j else 0 for k in range(m)): l * c
             for e, c in h_terms.items()})
        expanded = expanded + embedded
    return all(abs(c) <= tol for c in expanded.terms.values())


class Containment(enum.Enum):
    CUSP_COLLAPSE = "CuspCollapse"
    PAIRED_SLOPE = "PairedSlope"
    NONE_OF_THE_FORMS = "NoneOfTheForms"


@dataclass(frozen=True)
class ContainmentVerdict:
    kind: Containment
    cusp: int | None = None
    slope: tuple | None = None      # (a, b) for M_i^a = M_j^b

    def as_dict(self):
        out = {"kind": self.kind.value}
        if self.cusp is not None:
            out["cusp"] = self.cusp
        if self.slope is not None:
            out["slope"] = list(self.slope)
        return out


def _support_cusps(rows, n):
    support = set()
    for row in rows:
        for j in range(n):
            if row[2 * j] != 0 or row[2 * j + 1] != 0:
                support.add(j)
    return support


def classify_codim2_containment(lattice, shapes, pairing, potential=None):
    """Classify an anomalous codimension-2 subgroup through the identity.

    pairing lists the cusp index pairs that share a shape.  Returns
    CuspCollapse(i) when the lattice lives on one cusp with full block
    rank, PairedSlope(i, a, b) when it matches the cross-cusp slope
    pattern on a shape-shared pair, and NoneOfTheForms otherwise.  For
    identical-copy products with a nontrivial odd term (potential
    given), a PairedSlope verdict must additionally pass the series
    criterion, which restricts (a, b) to (1, +-1).
    """
    if lattice.k != 2:
        raise AnomalyError("containment classification needs a k=2 lattice")
    taus = [complex(getattr(s, "tau", s)) for s in shapes]
    if jacobian_rank(lattice, taus) != 1:
        raise AnomalyError("lattice is not anomalous (jacobian rank 2)")
    n = lattice.n
    support = _support_cusps(lattice.rows, n)

    if len(support) == 1:
        i = support.pop()
        block = [(row[2 * i], row[2 * i + 1]) for row in lattice.rows]
        if block[0][0] * block[1][1] - block[0][1] * block[1][0] != 0:
            return ContainmentVerdict(Containment.CUSP_COLLAPSE, cusp=i)
        return ContainmentVerdict(Containment.NONE_OF_THE_FORMS)

    if len(support) == 2:
        i, j = sorted(support)
        shared = {tuple(sorted(pr)) for pr in pairing}
        if (i, j) in shared:
            sub = tuple((row[2 * i], row[2 * i + 1], row[2 * j], row[2 * j + 1])
                        for row in lattice.rows)
            try:
                cls = classify_2x4_same_shape(sub)
            except AnomalyError:
                return ContainmentVerdict(Containment.NONE_OF_THE_FORMS)
            if cls.tag is Form.PROPORTIONAL_BLOCKS and cls.witness != 0:
                # right block = m * left block encodes a*u_i = b*u_j with
                # m = -b/a
                frac = -cls.witness
                a, b = frac.denominator, frac.numerator
                if potential is not None:
                    ok = anomaly_series_criterion(
                        potential, [Fraction(b, a)] + [0] * (n - 2))
                    if not ok:
                        return ContainmentVerdict(Containment.NONE_OF_THE_FORMS)
                return ContainmentVerdict(Containment.PAIRED_SLOPE,
                                          cusp=i, slope=(a, b))
    return ContainmentVerdict(Containment.NONE_OF_THE_FORMS)
