"""Exact Gaussian elimination over Q and Q(i).

Matrices are lists of rows. Entries may be ``Fraction`` or ``ExactScalar``;
anything with field arithmetic and a truthiness test for zero works.
"""
import logging
from fractions import Fraction
from typing import Sequence

from .errors import DimensionError, NumericError

logger = logging.getLogger(__name__)

Matrix = list[list]


def _shape(A: Sequence[Sequence]) -> tuple[int, int]:
    rows = len(A)
    cols = len(A[0]) if rows else 0
    if any(len(r) != cols for r in A):
        raise DimensionError("Ragged matrix")
    return rows, cols


def identity(n: int, one=Fraction(1), zero=Fraction(0)) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def rref(A: Sequence[Sequence]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns. The input is not modified."""
    R = [list(row) for row in A]
    nrows, ncols = _shape(R)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = next((i for i in range(r, nrows) if R[i][c]), None)
        if k is None:
            continue
        R[r], R[k] = R[k], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c]:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(A: Sequence[Sequence]) -> int:
    if not A or not A[0]:
        return 0
    return len(rref(A)[1])


def nullspace(A: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """Basis of {x : Ax = 0}, one vector per free column."""
    if not A:
        n = ncols or 0
        return identity(n)
    R, pivots = rref(A)
    n = len(R[0])
    zero = R[0][0] * 0
    one = zero + 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * n
        v[fc] = one
        for row, pc in enumerate(pivots):
            v[pc] = -R[row][fc]
        basis.append(v)
    return basis


def solve(A: Sequence[Sequence], b: Sequence) -> list:
    """Unique solution of a square, full-rank system."""
    nrows, ncols = _shape(A)
    if nrows != ncols or len(b) != nrows:
        raise DimensionError(f"solve needs a square system, got {nrows}x{ncols} with {len(b)} right-hand sides")
    augmented = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(augmented)
    if pivots != list(range(ncols)):
        raise NumericError("Singular system in exact solve")
    return [R[i][ncols] for i in range(ncols)]


def inverse(A: Sequence[Sequence]) -> Matrix:
    n, m = _shape(A)
    if n != m:
        raise DimensionError(f"inverse needs a square matrix, got {n}x{m}")
    if n == 0:
        return []
    zero = A[0][0] * 0
    augmented = [list(row) + [zero + (1 if i == j else 0) for j in range(n)] for i, row in enumerate(A)]
    R, pivots = rref(augmented)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise NumericError("Singular matrix in exact inverse")
    return [row[n:] for row in R]


def matmul(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    n, k = _shape(A)
    k2, m = _shape(B)
    if n and m and k != k2:
        raise DimensionError(f"Cannot multiply {n}x{k} by {k2}x{m}")
    cols = list(zip(*B)) if B else []
    return [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in A]


def matsub(A: Sequence[Sequence], B: Sequence[Sequence]) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]
