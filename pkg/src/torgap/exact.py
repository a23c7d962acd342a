"""Exact integer matrix algebra: normal forms, lattice sums, quotient groups.

Everything here runs on unbounded Python integers; no float ever enters a
result. The Smith form drives all homology computations downstream, so it is
deterministic (fixed pivot rule, nonnegative diagonal, divisibility chain) and
returns its unimodular transforms for exact verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, PreconditionError


class IntMatrix:
    """Immutable integer matrix with arbitrary-precision entries."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[int]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        for row in entries:
            if len(row) != cols:
                raise DimensionError("ragged rows in integer matrix")
            for x in row:
                if not isinstance(x, int):
                    raise TypeError(f"non-integer entry {x!r}")
        self.rows = rows
        self.cols = cols
        self.entries = tuple(tuple(int(x) for x in row) for row in entries)

    # -- constructors ------------------------------------------------------

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diagonal(cls, diag: Iterable[int]) -> "IntMatrix":
        d = list(diag)
        return cls([[d[i] if i == j else 0 for j in range(len(d))] for i in range(len(d))])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]]) -> "IntMatrix":
        if not columns:
            raise DimensionError("no columns given")
        n = len(columns[0])
        return cls([[int(col[i]) for col in columns] for i in range(n)])

    # -- basic algebra -----------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, IntMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"IntMatrix({[list(r) for r in self.entries]})"

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        ot = list(zip(*other.entries))
        return IntMatrix([[sum(a * b for a, b in zip(row, col)) for col in ot] for row in self.entries])

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-x for x in row] for row in self.entries])

    def transpose(self) -> "IntMatrix":
        return IntMatrix([list(col) for col in zip(*self.entries)])

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(row[j] for row in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise DimensionError("row counts differ")
        return IntMatrix([list(a) + list(b) for a, b in zip(self.entries, other.entries)])

    def to_float(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.entries], dtype=float)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def det(self) -> int:
        """Exact determinant by fraction-free Bareiss elimination."""
        if not self.is_square():
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = [list(row) for row in self.entries]
        sign = 1
        prev = 1
        for k in range(n - 1):
            if a[k][k] == 0:
                pivot = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if pivot is None:
                    return 0
                a[k], a[pivot] = a[pivot], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
                a[i][k] = 0
            prev = a[k][k]
        return sign * a[n - 1][n - 1]

    def inverse(self) -> "IntMatrix":
        """Exact inverse; requires |det| = 1 so the inverse stays integral."""
        d = self.det()
        if d not in (1, -1):
            raise PreconditionError(f"matrix with determinant {d} has no integer inverse")
        n = self.rows
        aug = [[Fraction(self.entries[i][j]) for j in range(n)]
               + [Fraction(1 if i == j else 0) for j in range(n)] for i in range(n)]
        for c in range(n):
            p = next(r for r in range(c, n) if aug[r][c] != 0)
            aug[c], aug[p] = aug[p], aug[c]
            pv = aug[c][c]
            aug[c] = [x / pv for x in aug[c]]
            for r in range(n):
                if r != c and aug[r][c] != 0:
                    f = aug[r][c]
                    aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
        return IntMatrix([[int(aug[i][n + j]) for j in range(n)] for i in range(n)])

    def rank(self) -> int:
        """Exact rank over the rationals."""
        if self.rows == 0 or self.cols == 0:
            return 0
        return sum(1 for d in smith_normal_form(self).diag if d != 0)


@dataclass(frozen=True)
class SmithForm:
    """Diagonalization U @ M @ V = diag with unimodular U, V.

    The diagonal is nonnegative and each entry divides the next.
    """

    left: IntMatrix
    diag: tuple[int, ...]
    right: IntMatrix

    def diagonal_matrix(self, rows: int, cols: int) -> IntMatrix:
        return IntMatrix([[self.diag[i] if (i == j and i < len(self.diag)) else 0
                           for j in range(cols)] for i in range(rows)])


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Isomorphism type: a list of invariant factors (each >= 2) plus free rank."""

    invariant_factors: tuple[int, ...]
    free_rank: int

    def __post_init__(self):
        for a, b in zip(self.invariant_factors, self.invariant_factors[1:]):
            if b % a != 0:
                raise PreconditionError(f"invariant factors {self.invariant_factors} not a divisibility chain")
        if any(f < 2 for f in self.invariant_factors):
            raise PreconditionError("invariant factors must be >= 2")

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors and self.free_rank == 0

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int:
        if self.free_rank != 0:
            raise PreconditionError("order undefined: group has positive free rank")
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def __str__(self):
        parts = [f"Z/{f}" for f in self.invariant_factors]
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def smith_normal_form(M: IntMatrix) -> SmithForm:
    """Smith normal form with explicit unimodular transforms.

    Pivot rule: the entry of smallest nonzero magnitude in the working
    submatrix (ties broken by position), which keeps coefficient growth tame
    on the badly scaled presentations produced by high matrix powers. Output
    is canonical: nonnegative diagonal in divisibility order.
    """
    if M.rows == 0 or M.cols == 0:
        raise PreconditionError("Smith form of an empty matrix")
    n, m = M.rows, M.cols
    a = [list(row) for row in M.entries]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    v = [[1 if i == j else 0 for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, q):
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    def negate_row(i):
        a[i] = [-x for x in a[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(n, m):
        # locate smallest-magnitude nonzero pivot in the trailing block
        pivot = None
        for i in range(t, n):
            for j in range(t, m):
                x = a[i][j]
                if x != 0 and (pivot is None or abs(x) < pivot[0]):
                    pivot = (abs(x), i, j)
        if pivot is None:
            break
        _, pi, pj = pivot
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        if a[t][t] < 0:
            negate_row(t)

        # clear row and column t; restart whenever a remainder shrinks the pivot
        dirty = True
        while dirty:
            dirty = False
            p = a[t][t]
            for i in range(t + 1, n):
                if a[i][t] != 0:
                    q = a[i][t] // p
                    addmul_row(i, t, q)
                    if a[i][t] != 0:
                        swap_rows(t, i)  # strictly smaller positive remainder
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, m):
                if a[t][j] != 0:
                    q = a[t][j] // p
                    addmul_col(j, t, q)
                    if a[t][j] != 0:
                        swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            # divisibility sweep: pivot must divide the whole trailing block
            for i in range(t + 1, n):
                bad = next((j for j in range(t + 1, m) if a[i][j] % p != 0), None)
                if bad is not None:
                    addmul_row(t, i, -1)  # fold row i into row t, then re-eliminate
                    dirty = True
                    break
        t += 1

    diag = []
    for i in range(min(n, m)):
        if a[i][i] == 0:
            break
        diag.append(a[i][i])
    diag.extend(0 for _ in range(min(n, m) - len(diag)))
    return SmithForm(IntMatrix(u), tuple(diag), IntMatrix(v))


def quotient_group(generators: IntMatrix, ambient_rank: int) -> FiniteAbelianGroup:
    """Isomorphism type of Z^ambient_rank modulo the column span of `generators`.

    An empty generator set leaves the free group of the ambient rank.
    """
    if generators.rows != ambient_rank:
        raise DimensionError(f"generators have {generators.rows} rows, ambient rank is {ambient_rank}")
    if generators.cols == 0:
        return FiniteAbelianGroup((), ambient_rank)
    snf = smith_normal_form(generators)
    nonzero = [d for d in snf.diag if d != 0]
    factors = tuple(d for d in nonzero if d >= 2)
    return FiniteAbelianGroup(factors, ambient_rank - len(nonzero))


def lattice_sum(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    """Column concatenation presenting the sum of two column-span lattices."""
    return A.hstack(B)


def int_matrix_power(A: IntMatrix, k: int) -> IntMatrix:
    """Exact k-th power; negative k requires a unimodular matrix."""
    if not A.is_square():
        raise DimensionError("power of a non-square matrix")
    base = A if k >= 0 else A.inverse()
    out = IntMatrix.identity(A.rows)
    for _ in range(abs(k)):
        out = out @ base
    return out
