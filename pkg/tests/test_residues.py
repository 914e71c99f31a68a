import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from salem.errors import ZeroModulus
from salem.expsum import exp_sum_bruteforce
from salem.fields import fixture
from salem.numfield import divides, field_norm
from salem.residues import read_csv, reduce_mod, residue_system, write_csv


def test_examples(gaussian):
    q = gaussian.element([1, 2])
    sys_ = residue_system(q)
    assert sys_.reps_array.tolist() == [[k, 0] for k in range(5)]
    assert reduce_mod(gaussian.element([5, 0]), sys_).coords == (0, 0)
    assert reduce_mod(gaussian.element([0, 1]), sys_).coords == (2, 0)
    assert sorted(map(tuple, residue_system(gaussian.element([2, 0])).reps_array.tolist())) == \
        [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert residue_system(gaussian.one()).norm == 1


def test_zero_modulus(gaussian):
    with pytest.raises(ZeroModulus):
        residue_system(gaussian.zero())


def test_csv_roundtrip(tmp_path, cbrt2):
    sys_ = residue_system(cbrt2.element([2, 1, 1]))
    assert np.array_equal(read_csv(write_csv(sys_, tmp_path / "r.csv")), sys_.reps_array)


coord = st.integers(-4, 4)


@pytest.mark.parametrize("name", ["gaussian", "sqrt2", "cbrt2"])
@given(data=st.data())
def test_complete_system(name, data):
    ctx = fixture(name)
    q = ctx.element(data.draw(st.lists(coord, min_size=ctx.n, max_size=ctx.n).filter(any)))
    sys_ = residue_system(q)
    assert sys_.norm == abs(field_norm(q))
    reps = sys_.reps
    if sys_.norm <= 40:
        for a, b in itertools.combinations(reps, 2):
            assert not divides(q, a - b)
    x = ctx.element(data.draw(st.lists(st.integers(-50, 50), min_size=ctx.n, max_size=ctx.n)))
    y = ctx.element(data.draw(st.lists(st.integers(-5, 5), min_size=ctx.n, max_size=ctx.n)))
    r = reduce_mod(x, sys_)
    assert reduce_mod(r, sys_) == r
    assert reduce_mod(x + q * y, sys_) == r
    assert divides(q, x - r)


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3).filter(any),
       st.lists(st.integers(-12, 12), min_size=3, max_size=3), st.integers(0, 2))
def test_shift_invariance(qc, s, j):
    ctx = fixture("cbrt2")
    sys_ = residue_system(ctx.element(qc))
    a = exp_sum_bruteforce(sys_.modulus, s, sys_)
    b = exp_sum_bruteforce(sys_.modulus, s, reps=sys_.shifted(j))
    assert abs(a - b) <= 1e-12 * max(1, sys_.norm)
