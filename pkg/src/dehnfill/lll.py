"""Exact LLL lattice basis reduction over the integers.

Gram-Schmidt data is kept as Fractions, so the reduction is exact for
the small, tall-entry bases produced by the integer-relation embedding
(dimension <= ~10, entries up to ~10^60).
"""

from fractions import Fraction


def _dot(v1, v2):
    return sum(a * b for a, b in zip(v1, v2))


def _gram_schmidt(basis):
    ortho = []
    for vec in basis:
        w = [Fraction(x) for x in vec]
        for u in ortho:
            uu = _dot(u, u)
            if uu == 0:
                continue
            coef = _dot(w, u) / uu
            w = [a - coef * b for a, b in zip(w, u)]
        ortho.append(w)
    return ortho


def lll_reduce(basis, delta=Fraction(99, 100)):
    """Return an LLL-reduced basis for the row lattice of `basis`."""
    b = [[int(x) for x in row] for row in basis]
    n = len(b)
    if n <= 1:
        return b
    ortho = _gram_schmidt(b)

    def mu(i, j):
        denom = _dot(ortho[j], ortho[j])
        if denom == 0:
            return Fraction(0)
        return Fraction(_dot(b[i], ortho[j]), 1) / denom

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            m = mu(k, j)
            if abs(m) > Fraction(1, 2):
                r = round(m)
                b[k] = [a - r * c for a, c in zip(b[k], b[j])]
        if _dot(ortho[k], ortho[k]) >= (delta - mu(k, k - 1) ** 2) * _dot(ortho[k - 1], ortho[k - 1]):
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            # only rows k-1, k of the orthogonalization change
            old = ortho[k - 1]
            new_prev = [Fraction(x) for x in b[k - 1]]
            for u in ortho[:k - 1]:
                uu = _dot(u, u)
                if uu == 0:
                    continue
                coef = _dot(new_prev, u) / uu
                new_prev = [a - coef * c for a, c in zip(new_prev, u)]
            ortho[k - 1] = new_prev
            w = old
            uu = _dot(new_prev, new_prev)
            if uu != 0:
                coef = _dot(w, new_prev) / uu
                w = [a - coef * c for a, c in zip(w, new_prev)]
            ortho[k] = w
            k = max(k - 1, 1)
    return b
