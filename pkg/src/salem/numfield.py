"""Exact arithmetic in a number field given by a multiplication table.

A field ``K`` of degree ``n`` is described on a basis ``w_0 .. w_{n-1}`` by an
integer tensor ``c`` with ``w_i * w_j = sum_k c[i][j][k] w_k``.  Elements are
coordinate vectors of exact rationals; an element lies in the ring of
integers exactly when all its coordinates are integers (the basis is assumed
to be an integral basis).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import numpy as np

from . import linalg
from .errors import (
    ContextMismatch,
    DivisionByZeroElement,
    NoIdentity,
    NonAssociativeTable,
    NonCommutativeTable,
    SingularGram,
)


def companion_table(min_poly) -> np.ndarray:
    """Multiplication table of the power basis ``1, a, .., a^{n-1}``.

    ``min_poly`` lists integer coefficients ``[c0, c1, .., cn]`` of a monic
    polynomial (``cn == 1``), lowest degree first.
    """
    coeffs = [int(c) for c in min_poly]
    if coeffs[-1] != 1:
        raise ValueError("min_poly must be monic with integer coefficients")
    n = len(coeffs) - 1
    # powers a^0 .. a^{2n-2} reduced to the power basis
    powers = []
    cur = [0] * n
    cur[0] = 1
    for _ in range(2 * n - 1):
        powers.append(list(cur))
        # multiply by a: shift up, reduce a^n = -(c0 + c1 a + ... )
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [x - top * c for x, c in zip(cur, coeffs[:-1])]
    table = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            table[i, j, :] = powers[i + j]
    return table


@dataclass(frozen=True, eq=False)
class FieldContext:
    """Number field on an integral basis; derived data computed lazily and cached."""

    mult_table: np.ndarray
    min_poly: tuple | None = None
    name: str = ""
    basis_labels: tuple = field(default=())

    @property
    def degree(self) -> int:
        return self.mult_table.shape[0]

    @property
    def n(self) -> int:
        return self.mult_table.shape[0]

    def __repr__(self):
        return f"FieldContext(name={self.name!r}, degree={self.degree})"

    # -- elements -----------------------------------------------------------

    def element(self, coords) -> "FieldElement":
        return FieldElement(tuple(_exact(c) for c in coords), self)

    def one(self) -> "FieldElement":
        return self.element([1] + [0] * (self.n - 1))

    def zero(self) -> "FieldElement":
        return self.element([0] * self.n)

    def basis(self, j: int) -> "FieldElement":
        return self.element([1 if k == j else 0 for k in range(self.n)])

    # -- matrices -----------------------------------------------------------

    def mult_matrix_int(self, coords) -> np.ndarray:
        """Integer matrix of multiplication by an integral element."""
        q = np.asarray(coords, dtype=np.int64)
        return np.einsum("i,ijk->kj", q, self.mult_table)

    def mult_matrices_int(self, coords) -> np.ndarray:
        """Batched version: ``coords`` has shape ``(m, n)``."""
        q = np.asarray(coords, dtype=np.int64)
        return np.einsum("bi,ijk->bkj", q, self.mult_table)

    # -- derived data -------------------------------------------------------

    @cached_property
    def trace_gram(self):
        """``Tr(w_i w_j)`` with the trace of an element taken as the trace of its matrix."""
        traces = [int(np.trace(self.mult_matrix_int(_unit(self.n, k)))) for k in range(self.n)]
        c = self.mult_table
        return [
            [sum(int(c[i, j, k]) * traces[k] for k in range(self.n)) for j in range(self.n)]
            for i in range(self.n)
        ]

    @cached_property
    def dual_basis(self) -> list:
        """Trace-dual basis expressed in the original coordinates (exact rationals).

        Vector ``j`` holds the coordinates of ``w'_j``, defined by
        ``Tr(w_i w'_j) = [i == j]``.
        """
        inv = linalg.frac_inv(self.trace_gram)
        if inv is None:
            raise SingularGram(f"trace Gram matrix of {self.name or 'field'} is singular")
        # Gram is symmetric, so column j of its inverse gives w'_j.
        return [[inv[k][j] for k in range(self.n)] for j in range(self.n)]

    @cached_property
    def clearing_constant(self) -> int:
        """Least positive integer C with C * w'_j integral for every j."""
        return linalg.lcm_of_denominators(x for vec in self.dual_basis for x in vec)

    @cached_property
    def dual_to_standard(self):
        """Matrix taking coordinates on the dual basis to coordinates on the original basis."""
        return linalg.transpose(self.dual_basis)

    def dual_element(self, s) -> "FieldElement":
        """The element ``sum_j s_j w'_j``."""
        return self.element(linalg.frac_matvec(self.dual_to_standard, [Fraction(x) for x in s]))

    def cleared_dual_int(self, s) -> list:
        """Integer coordinates of ``C_B * sum_j s_j w'_j``."""
        c = self.clearing_constant
        v = linalg.frac_matvec(self.dual_to_standard, [Fraction(x) for x in s])
        out = [c * x for x in v]
        assert all(x.denominator == 1 for x in out)
        return [int(x) for x in out]

    @cached_property
    def cleared_dual_matrix(self) -> np.ndarray:
        """Integer matrix ``C_B * P`` where ``P`` maps dual coordinates to standard ones."""
        c = self.clearing_constant
        return np.array(
            [[int(c * x) for x in row] for row in self.dual_to_standard], dtype=np.int64
        )

    def mult_matrix_in_dual(self, x: "FieldElement"):
        """Matrix of multiplication by ``x`` with respect to the dual basis."""
        p = self.dual_to_standard
        pinv = linalg.frac_inv(p)
        return linalg.frac_matmul(linalg.frac_matmul(pinv, mult_matrix(x)), p)

    @cached_property
    def embedding_data(self):
        from .qselect import embeddings

        return embeddings(self)


def _unit(n, k):
    v = [0] * n
    v[k] = 1
    return v


def _exact(x):
    if isinstance(x, (int, Fraction)):
        return x
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float) and x.is_integer():
        return int(x)
    return Fraction(x)


def make_field(mult_table=None, min_poly=None, name: str = "", basis_labels=None) -> FieldContext:
    """Validate a multiplication table (or build one from ``min_poly``) and return a context.

    Raises NoIdentity, NonCommutativeTable or NonAssociativeTable naming the
    first failing index triple.
    """
    if mult_table is None:
        if min_poly is None:
            raise ValueError("need a multiplication table or a minimal polynomial")
        table = companion_table(min_poly)
    else:
        raw = np.asarray(mult_table)
        if raw.dtype.kind == "f" and not np.all(raw == np.round(raw)):
            raise ValueError("multiplication table entries must be integers")
        table = raw.astype(np.int64)
    if table.ndim != 3 or len(set(table.shape)) != 1:
        raise ValueError(f"multiplication table must be n x n x n, got shape {table.shape}")
    n = table.shape[0]
    if n < 2:
        raise ValueError("degree must be at least 2")

    for j in range(n):
        expect = np.zeros(n, dtype=np.int64)
        expect[j] = 1
        if not np.array_equal(table[0, j], expect) or not np.array_equal(table[j, 0], expect):
            raise NoIdentity(f"w_0 is not a multiplicative identity (fails on w_{j})", (0, j))
    for i, j in product(range(n), repeat=2):
        if not np.array_equal(table[i, j], table[j, i]):
            raise NonCommutativeTable(f"w_{i} w_{j} != w_{j} w_{i}", (i, j))
    # (w_i w_j) w_k == w_i (w_j w_k)
    left = np.einsum("ijm,mkl->ijkl", table, table)
    right = np.einsum("jkm,iml->ijkl", table, table)
    bad = np.argwhere(np.any(left != right, axis=-1))
    if len(bad):
        i, j, k = (int(v) for v in bad[0])
        raise NonAssociativeTable(f"(w_{i} w_{j}) w_{k} != w_{i} (w_{j} w_{k})", (i, j, k))

    labels = tuple(basis_labels) if basis_labels else tuple(f"w{k}" for k in range(n))
    mp = tuple(int(c) for c in min_poly) if min_poly is not None else None
    return FieldContext(mult_table=table, min_poly=mp, name=name, basis_labels=labels)


@dataclass(frozen=True)
class FieldElement:
    coords: tuple
    ctx: FieldContext = field(repr=False, compare=False)

    def __post_init__(self):
        if len(self.coords) != self.ctx.n:
            raise ValueError(f"expected {self.ctx.n} coordinates, got {len(self.coords)}")

    def __hash__(self):
        return hash((id(self.ctx), self.coords))

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.ctx is other.ctx and self.coords == other.coords

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.ctx is not self.ctx:
            raise ContextMismatch("elements belong to different field contexts")

    def __add__(self, other):
        self._check(other)
        return FieldElement(tuple(a + b for a, b in zip(self.coords, other.coords)), self.ctx)

    def __sub__(self, other):
        self._check(other)
        return FieldElement(tuple(a - b for a, b in zip(self.coords, other.coords)), self.ctx)

    def __neg__(self):
        return FieldElement(tuple(-a for a in self.coords), self.ctx)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return FieldElement(tuple(a * other for a in self.coords), self.ctx)
        self._check(other)
        c = self.ctx.mult_table
        n = self.ctx.n
        out = [0] * n
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(other.coords):
                if b == 0:
                    continue
                ab = a * b
                for k in range(n):
                    ck = int(c[i, j, k])
                    if ck:
                        out[k] += ab * ck
        return FieldElement(tuple(out), self.ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return quotient(other, self)

    @property
    def is_integral(self) -> bool:
        return all(Fraction(x).denominator == 1 for x in self.coords)

    @property
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coords)

    @property
    def height(self):
        return max(abs(x) for x in self.coords)

    def int_coords(self) -> tuple:
        return tuple(int(x) for x in self.coords)

    def conj_free_repr(self) -> str:
        return "(" + ", ".join(str(x) for x in self.coords) + ")"


def ring_add(a: FieldElement, b: FieldElement) -> FieldElement:
    return a + b


def ring_sub(a: FieldElement, b: FieldElement) -> FieldElement:
    return a - b


def ring_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def mult_matrix(a: FieldElement):
    """Exact matrix of multiplication by ``a``; column j holds the coordinates of ``a * w_j``."""
    c = a.ctx.mult_table
    n = a.ctx.n
    return [
        [sum((a.coords[i] * int(c[i, j, k]) for i in range(n)), Fraction(0)) for j in range(n)]
        for k in range(n)
    ]


def field_norm(a: FieldElement) -> Fraction:
    """``N(a) = det A_a``."""
    if a.is_integral:
        return Fraction(int(linalg.int_det_batch(a.ctx.mult_matrix_int(a.int_coords()))))
    return linalg.frac_det(mult_matrix(a))


def field_trace(a: FieldElement) -> Fraction:
    m = mult_matrix(a)
    return sum((m[i][i] for i in range(a.ctx.n)), Fraction(0))


def inverse(a: FieldElement) -> FieldElement:
    if a.is_zero:
        raise DivisionByZeroElement("the zero element has no inverse")
    x = linalg.frac_solve(mult_matrix(a), [1] + [0] * (a.ctx.n - 1))
    if x is None:
        raise DivisionByZeroElement(f"{a.conj_free_repr()} is a zero divisor")
    return a.ctx.element(x)


def quotient(b: FieldElement, q: FieldElement) -> FieldElement:
    """Exact ``q / b`` computed as ``A_b^{-1} q``."""
    if b.ctx is not q.ctx:
        raise ContextMismatch("elements belong to different field contexts")
    if b.is_zero:
        raise DivisionByZeroElement("division by the zero element")
    x = linalg.frac_solve(mult_matrix(b), list(q.coords))
    if x is None:
        raise DivisionByZeroElement(f"{b.conj_free_repr()} is a zero divisor")
    return q.ctx.element(x)


def divides(b: FieldElement, q: FieldElement) -> bool:
    """True iff ``q / b`` lies in the ring of integers."""
    return quotient(b, q).is_integral


def norm_zero(a: FieldElement) -> bool:
    """Flag zero divisors (and zero): a nonzero element with vanishing norm means the
    table describes an algebra that is not a field."""
    return field_norm(a) == 0


def divides_batch(ctx: FieldContext, divisors, targets) -> np.ndarray:
    """Exact test ``divisors[i] | targets[j]`` for integer coordinate arrays.

    Returns a boolean matrix of shape ``(len(divisors), len(targets))``.
    Uses ``adj(A_b) t == 0 (mod det A_b)`` so no rational arithmetic is needed.
    """
    divisors = np.atleast_2d(np.asarray(divisors, dtype=np.int64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.int64))
    mats = ctx.mult_matrices_int(divisors)
    dets = linalg.int_det_batch(mats)
    if np.any(dets == 0):
        raise DivisionByZeroElement("a divisor has zero norm")
    adjs = linalg.int_adj_batch(mats)
    # numerators[b, t, k] = (adj_b @ target_t)_k
    if adjs.dtype == object or targets.dtype == object:
        num = np.einsum("bkj,tj->btk", adjs.astype(object), targets.astype(object))
    else:
        bound = int(np.abs(adjs).max(initial=0)) * int(np.abs(targets).max(initial=0)) * ctx.n
        if bound >= 2**62:
            num = np.einsum("bkj,tj->btk", adjs.astype(object), targets.astype(object))
        else:
            num = np.einsum("bkj,tj->btk", adjs, targets)
    d = np.abs(dets)[:, None, None]
    return np.all(num % d == 0, axis=-1)


def dual_transpose_law_holds(ctx: FieldContext) -> bool:
    """Check that multiplication by each basis element, written on the dual basis,
    is the transpose of its matrix on the original basis."""
    for j in range(ctx.n):
        w = ctx.basis(j)
        a = mult_matrix(w)
        if ctx.mult_matrix_in_dual(w) != linalg.transpose(a):
            return False
    return True


def integer_nth_root_floor(m: int, k: int) -> int:
    """Largest integer r >= 0 with r**k <= m."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    r = int(round(m ** (1.0 / k)))
    while r**k > m:
        r -= 1
    while (r + 1) ** k <= m:
        r += 1
    return r


def gcd_list(values) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, int(v))
    return g
