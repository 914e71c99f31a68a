from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from salem import linalg
from salem.errors import NonCommutativeTable
from salem.fields import fixture
from salem.numfield import (divides, divides_batch, dual_transpose_law_holds, field_norm, make_field,
                            mult_matrix, norm_zero, quotient, ring_add, ring_mul)
from salem.qselect import embedding_norm

small = st.integers(-20, 20)


def elem(ctx, coords):
    return ctx.element(list(coords))


def test_gaussian_structure(gaussian):
    assert gaussian.n == 2
    assert gaussian.one().coords == (1, 0)


def test_split_algebra_flags_zero_divisor():
    ctx = make_field(mult_table=[[[1, 0], [0, 1]], [[0, 1], [1, 0]]])
    assert norm_zero(ctx.element([1, 1]))
    assert ring_mul(ctx.element([1, 1]), ctx.element([1, -1])).is_zero


def test_noncommutative_table_rejected():
    t = np.zeros((3, 3, 3), dtype=int)
    for j in range(3):
        t[0, j, j] = t[j, 0, j] = 1
    t[1, 2] = [0, 1, 0]
    with pytest.raises(NonCommutativeTable):
        make_field(mult_table=t.tolist())


def test_products(gaussian, cbrt2):
    assert ring_mul(elem(gaussian, (1, 2)), elem(gaussian, (1, -2))).coords == (5, 0)
    assert ring_mul(elem(cbrt2, (0, 1, 0)), elem(cbrt2, (0, 0, 1))).coords == (2, 0, 0)


def test_matrices(gaussian, cbrt2):
    assert mult_matrix(elem(gaussian, (3, 7))) == [[3, -7], [7, 3]]
    assert mult_matrix(elem(cbrt2, (1, 2, 3))) == [[1, 6, 4], [2, 1, 6], [3, 2, 1]]


def test_norms(gaussian, cbrt2):
    assert field_norm(elem(gaussian, (1, 2))) == 5
    assert field_norm(elem(cbrt2, (0, 1, 0))) == 2
    assert field_norm(cbrt2.one()) == 1


def test_dual_basis_and_clearing_constant(gaussian, cbrt2):
    h = Fraction(1, 2)
    assert [tuple(v) for v in gaussian.dual_basis] == [(h, 0), (0, -h)]
    s = Fraction(1, 6)
    assert [tuple(v) for v in cbrt2.dual_basis] == [(Fraction(1, 3), 0, 0), (0, 0, s), (0, s, 0)]
    assert gaussian.clearing_constant == 2
    assert cbrt2.clearing_constant == 6


def test_divides(gaussian):
    assert divides(elem(gaussian, (1, 1)), elem(gaussian, (2, 0)))
    assert quotient(elem(gaussian, (1, 1)), elem(gaussian, (2, 0))).coords == (1, -1)
    assert not divides(elem(gaussian, (1, 2)), elem(gaussian, (2, 0)))
    assert divides(gaussian.one(), elem(gaussian, (17, -3)))


def test_transpose_law(any_field):
    assert dual_transpose_law_holds(any_field)


@given(st.tuples(small, small, small), st.tuples(small, small, small))
def test_homomorphism_cbrt2(a, b):
    ctx = fixture("cbrt2")
    x, y = elem(ctx, a), elem(ctx, b)
    ma, mb = mult_matrix(x), mult_matrix(y)
    assert mult_matrix(ring_add(x, y)) == [[p + q for p, q in zip(r, s)] for r, s in zip(ma, mb)]
    assert mult_matrix(ring_mul(x, y)) == linalg.frac_matmul(ma, mb)
    assert field_norm(ring_mul(x, y)) == field_norm(x) * field_norm(y)


@given(st.lists(small, min_size=4, max_size=4).filter(any))
def test_norm_matches_embeddings(a):
    ctx = fixture("zeta8")
    x = elem(ctx, a)
    assert embedding_norm(x) == pytest.approx(float(field_norm(x)), rel=1e-9)


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=2).filter(any),
       st.lists(st.integers(-30, 30), min_size=2, max_size=2))
def test_divides_batch_matches_exact(b, t):
    ctx = fixture("gaussian")
    assert bool(divides_batch(ctx, [b], [t])[0, 0]) == divides(elem(ctx, b), elem(ctx, t))
