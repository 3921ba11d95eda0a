"""Small dense matrix routines over any commutative ring whose elements support
``+ - *`` and ``is_zero() / is_unit() / inverse()``.

Matrices are lists of rows.  Gaussian elimination only ever divides by units,
which makes it valid over local rings for invertible matrices; the
determinant is computed division-free.
"""
from __future__ import annotations

from itertools import combinations
from typing import Callable, Sequence


class SingularMatrixError(ArithmeticError):
    pass


def shape(A):
    return len(A), (len(A[0]) if A else 0)


def identity(n: int, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_map(f: Callable, A):
    return [[f(a) for a in row] for row in A]


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_mul(A, B):
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} * {k2}x{m}")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A, v):
    return [row[0] * v[0] + _sum(row[t] * v[t] for t in range(1, len(v))) for row in A] if len(v) > 1 else [
        row[0] * v[0] for row in A
    ]


def _sum(it):
    it = iter(it)
    acc = next(it)
    for x in it:
        acc = acc + x
    return acc


def transpose(A):
    return [list(col) for col in zip(*A)]


def columns(A):
    return transpose(A)


def from_columns(cols):
    return transpose(cols)


def mat_eq(A, B) -> bool:
    if shape(A) != shape(B):
        return False
    return all((a - b).is_zero() for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def is_zero_matrix(A) -> bool:
    return all(a.is_zero() for row in A for a in row)


def mat_inv(A):
    """Inverse by Gauss-Jordan with unit pivots; raises SingularMatrixError."""
    n, m = shape(A)
    if n != m:
        raise ValueError("inverse of a non-square matrix")
    if n == 0:
        return []
    one = _one_like(A[0][0])
    zero = A[0][0] - A[0][0]
    M = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c].is_unit()), None)
        if piv is None:
            raise SingularMatrixError(f"no unit pivot in column {c}")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inverse()
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and not M[r][c].is_zero():
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]


def _one_like(x):
    # every element type here offers a ``one()`` factory through its parent
    return x.parent_one()


def rank(A) -> int:
    """Rank over a field (elements must be units iff nonzero)."""
    M = [list(row) for row in A]
    n, m = shape(M)
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, n) if not M[i][c].is_zero()), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = M[r][c].inverse()
        M[r] = [x * inv for x in M[r]]
        for i in range(n):
            if i != r and not M[i][c].is_zero():
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[r])]
        r += 1
        if r == n:
            break
    return r


def det(A):
    """Division-free determinant (Laplace expansion over column subsets)."""
    n, m = shape(A)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        raise ValueError("empty matrix")
    # minors[S] = det of rows 0..|S|-1 restricted to the column set S
    minors = {(c,): A[0][c] for c in range(n)}
    for k in range(1, n):
        new = {}
        for cols in combinations(range(n), k + 1):
            acc = None
            for pos, c in enumerate(cols):
                sub = cols[:pos] + cols[pos + 1:]
                term = A[k][c] * minors[sub]
                if (k - pos) % 2:
                    term = -term
                acc = term if acc is None else acc + term
            new[cols] = acc
        minors = new
    return minors[tuple(range(n))]


def mat_pow(A, e: int):
    n = len(A)
    one = _one_like(A[0][0])
    zero = A[0][0] - A[0][0]
    R = identity(n, one, zero)
    B = A
    while e:
        if e & 1:
            R = mat_mul(R, B)
        B = mat_mul(B, B)
        e >>= 1
    return R


def is_identity(A) -> bool:
    n = len(A)
    return all(
        (A[i][j] - (A[i][j].parent_one() if i == j else A[i][j] - A[i][j])).is_zero()
        for i in range(n)
        for j in range(n)
    )


def matrix_order(A, limit: int = 10**6) -> int:
    """Multiplicative order of an invertible matrix (brute iteration)."""
    B = A
    for k in range(1, limit + 1):
        if is_identity(B):
            return k
        B = mat_mul(B, A)
    raise ArithmeticError("matrix order exceeds limit")


def format_matrix(A, fmt: Callable = str) -> str:
    return "\n".join(" ; ".join(fmt(a) for a in row) for row in A)


def kron_blocks(blocks: Sequence[Sequence]):
    """Assemble a block matrix given as a grid of equally sized numpy blocks."""
    import numpy as np

    return np.block([[b for b in row] for row in blocks])
