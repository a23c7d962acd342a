"""Independent oracles and random generators shared by the test suite.

Everything here deliberately avoids the library's own code paths: the minor
gcd oracle recomputes invariant factors combinatorially, determinants are
expanded recursively, and the random matrix generators build unimodular and
symplectic matrices from elementary factors.
"""

import math
from itertools import combinations

import numpy as np

SQRT2 = math.sqrt(2.0)

# eigen-data of the built-in genus-2 action, frozen from the closed forms
GENUS2_EXPANDING_VALUE = 3 + 2 * SQRT2
GENUS2_CONTRACTING_VALUE = 3 - 2 * SQRT2
GENUS2_CONTRACTING_VECTORS = [
    [2.0, -2 * SQRT2 - 1, 0.0, 1.0],
    [-2 * SQRT2 + 1, 2.0, 1.0, 0.0],
]
GENUS2_EXPANDING_VECTORS = [
    [2.0, 2 * SQRT2 - 1, 0.0, 1.0],
    [2 * SQRT2 + 1, 2.0, 1.0, 0.0],
]


def det_expand(rows):
    """Exact determinant by cofactor expansion (integers only)."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        total += (-1) ** j * rows[0][j] * det_expand(minor)
    return total


def minor_gcd_invariant_factors(entries):
    """Invariant factors as successive quotients of k-minor gcds."""
    rows = len(entries)
    cols = len(entries[0])
    out = []
    prev = 1
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rsel in combinations(range(rows), k):
            for csel in combinations(range(cols), k):
                sub = [[entries[r][c] for c in csel] for r in rsel]
                g = math.gcd(g, abs(det_expand(sub)))
        if g == 0:
            out.append(0)
            prev = 0
            continue
        out.append(g // prev)
        prev = g
    return out


def random_int_matrix(rng, max_dim=6, lo=-9, hi=9):
    r = int(rng.integers(1, max_dim + 1))
    c = int(rng.integers(1, max_dim + 1))
    return [[int(rng.integers(lo, hi + 1)) for _ in range(c)] for _ in range(r)]


def random_unimodular(rng, n, steps=12):
    """Product of elementary row additions and swaps; determinant +-1."""
    m = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.integers(0, n, size=2)
        if i == j:
            continue
        q = int(rng.integers(-2, 3))
        for k in range(n):
            m[i][k] += q * m[j][k]
        if rng.integers(0, 4) == 0:
            m[i], m[j] = m[j], m[i]
    return m


def random_symplectic(rng, g, steps=6):
    """Integer symplectic matrix as a product of shears and block units."""
    n = 2 * g

    def matmul(a, b):
        return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]

    def identity():
        return [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    out = identity()
    for _ in range(steps):
        kind = rng.integers(0, 3)
        m = identity()
        if kind == 0:
            # upper shear [[I, S], [0, I]] with S symmetric
            s = rng.integers(-2, 3, size=(g, g))
            s = (s + s.T).tolist()
            for i in range(g):
                for j in range(g):
                    m[i][g + j] = int(s[i][j])
        elif kind == 1:
            # lower shear [[I, 0], [T, I]] with T symmetric
            t = rng.integers(-2, 3, size=(g, g))
            t = (t + t.T).tolist()
            for i in range(g):
                for j in range(g):
                    m[g + i][j] = int(t[i][j])
        else:
            # block unit diag(U, U^-T) for unimodular U
            u = random_unimodular(rng, g, steps=6)
            uinv_t = _int_inverse_transpose(u)
            for i in range(g):
                for j in range(g):
                    m[i][j] = u[i][j]
                    m[g + i][g + j] = uinv_t[i][j]
        out = matmul(out, m)
    return out


def _int_inverse_transpose(u):
    """(U^-1)^T for unimodular integer U, via rational elimination."""
    from fractions import Fraction

    n = len(u)
    aug = [[Fraction(u[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for c in range(n):
        p = next(r for r in range(c, n) if aug[r][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    inv = [[int(aug[i][n + j]) for j in range(n)] for i in range(n)]
    return [list(row) for row in zip(*inv)]


def continued_fraction_terminates(x, depth=20, tol=1e-9):
    """True when x unwinds to a rational within `depth` partial quotients."""
    y = float(x)
    for _ in range(depth):
        a = math.floor(y)
        frac = y - a
        if abs(frac) < tol:
            return True
        y = 1.0 / frac
    return False
