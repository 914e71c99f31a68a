"""Exact integer and rational linear algebra on small square matrices.

Everything here works on Python ints / ``fractions.Fraction`` or on integer
numpy arrays whose dtype is promoted to ``object`` when int64 could overflow.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from itertools import combinations

import numpy as np

_INT64_SAFE = 2**62


def as_fraction_matrix(rows):
    return [[Fraction(x) for x in row] for row in rows]


def frac_det(rows) -> Fraction:
    """Determinant by fraction-valued Gaussian elimination."""
    a = as_fraction_matrix(rows)
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


def frac_solve(rows, rhs):
    """Solve ``A x = b`` exactly; ``rhs`` is a vector or a list of columns.

    Returns None when the matrix is singular.
    """
    n = len(rows)
    single = not isinstance(rhs[0], (list, tuple))
    cols = [list(rhs)] if single else [list(c) for c in rhs]
    aug = [
        [Fraction(x) for x in rows[i]] + [Fraction(c[i]) for c in cols]
        for i in range(n)
    ]
    width = len(aug[0])
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    sols = [[aug[i][n + k] for i in range(n)] for k in range(width - n)]
    return sols[0] if single else sols


def frac_inv(rows):
    n = len(rows)
    ident = [[1 if i == j else 0 for i in range(n)] for j in range(n)]
    cols = frac_solve(rows, ident)
    if cols is None:
        return None
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def frac_matmul(a, b):
    return [
        [sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0)) for j in range(len(b[0]))]
        for i in range(len(a))
    ]


def frac_matvec(a, v):
    return [sum((a[i][k] * v[k] for k in range(len(v))), Fraction(0)) for i in range(len(a))]


def transpose(a):
    return [list(col) for col in zip(*a)]


def lcm_of_denominators(values) -> int:
    return reduce(math.lcm, (Fraction(v).denominator for v in values), 1)


# ---------------------------------------------------------------------------
# Batched exact integer determinants and adjugates
# ---------------------------------------------------------------------------

def _safe_dtype(a: np.ndarray):
    """Pick int64 when every n x n minor fits, object dtype otherwise."""
    n = a.shape[-1]
    if a.dtype == object:
        return object
    bound = int(np.abs(a).max(initial=0))
    if math.factorial(n) * max(bound, 1) ** n < _INT64_SAFE:
        return np.int64
    return object


def _det_laplace(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    if n == 1:
        return a[..., 0, 0]
    if n == 2:
        return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]
    total = None
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=-2), j, axis=-1)
        term = a[..., 0, j] * _det_laplace(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def int_det_batch(a) -> np.ndarray:
    """Exact determinants of a stack of integer matrices (shape ``(..., n, n)``)."""
    a = np.asarray(a)
    a = a.astype(_safe_dtype(a))
    return _det_laplace(a)


def int_adj_batch(a) -> np.ndarray:
    """Exact adjugates, ``adj(A) @ A == det(A) * I``."""
    a = np.asarray(a)
    a = a.astype(_safe_dtype(a))
    n = a.shape[-1]
    adj = np.zeros(a.shape, dtype=a.dtype)
    if n == 1:
        adj[..., 0, 0] = 1
        return adj
    for i in range(n):
        for j in range(n):
            minor = np.delete(np.delete(a, j, axis=-2), i, axis=-1)
            c = _det_laplace(minor)
            adj[..., i, j] = -c if (i + j) % 2 else c
    return adj


# ---------------------------------------------------------------------------
# Normal forms
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int):
    """Return (g, x, y) with a*x + b*y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hnf_upper(rows):
    """Column-style Hermite normal form of a nonsingular integer matrix.

    Returns ``H`` (list of lists of int), upper triangular with positive
    diagonal and ``0 <= H[i][j] < H[i][i]`` for ``j > i``, spanning the same
    column lattice as the input.
    """
    h = [[int(x) for x in row] for row in rows]
    n = len(h)

    def col_combine(i, j, a, b, c, d):
        # (col_i, col_j) <- (a col_i + b col_j, c col_i + d col_j)
        for r in range(n):
            xi, xj = h[r][i], h[r][j]
            h[r][i] = a * xi + b * xj
            h[r][j] = c * xi + d * xj

    for i in range(n - 1, -1, -1):
        # clear row i in columns 0..i-1 into column i
        for j in range(i):
            if h[i][j] == 0:
                continue
            a, b = h[i][i], h[i][j]
            g, x, y = _xgcd(a, b)
            # new col_i = x col_i + y col_j ; new col_j = -(b/g) col_i + (a/g) col_j
            col_combine(i, j, x, y, -(b // g), a // g)
        if h[i][i] == 0:
            raise ZeroDivisionError("singular matrix has no full-rank HNF")
        if h[i][i] < 0:
            for r in range(n):
                h[r][i] = -h[r][i]
        d = h[i][i]
        for j in range(i + 1, n):
            k = h[i][j] // d
            if k:
                for r in range(n):
                    h[r][j] -= k * h[r][i]
    return h


def hnf_reduce(h, x):
    """Reduce integer vector ``x`` into the box ``0 <= x_k < H[k][k]`` modulo the columns of ``h``."""
    x = [int(v) for v in x]
    n = len(h)
    for k in range(n - 1, -1, -1):
        t = x[k] // h[k][k]
        if t:
            for r in range(k + 1):
                x[r] -= t * h[r][k]
    return x


def hnf_reduce_batch(h, x: np.ndarray) -> np.ndarray:
    """Vectorized ``hnf_reduce`` over the rows of an integer array."""
    x = np.array(x, dtype=np.int64, copy=True)
    hm = np.asarray(h, dtype=np.int64)
    n = hm.shape[0]
    for k in range(n - 1, -1, -1):
        t = np.floor_divide(x[:, k], hm[k, k])
        x[:, : k + 1] -= t[:, None] * hm[: k + 1, k][None, :]
    return x


def smith_invariants(rows):
    """Invariant factors d_1 | d_2 | ... | d_n from determinantal divisors.

    Intended for the small matrices used here (n <= 5).
    """
    n = len(rows)
    prev = 1
    out = []
    for k in range(1, n + 1):
        g = 0
        for ri in combinations(range(n), k):
            for ci in combinations(range(n), k):
                minor = [[rows[r][c] for c in ci] for r in ri]
                g = math.gcd(g, int(frac_det(minor)))
        if g == 0:
            out.append(0)
            prev = 0
            continue
        out.append(g // prev)
        prev = g
    return out
