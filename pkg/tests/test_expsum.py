import numpy as np
import pytest
from hypothesis import given, strategies as st

from salem.expsum import (Criterion, exp_sum_bruteforce, exp_sum_table, integrality_criterion,
                          predicted_sum, weak_vanishing_direction_holds)
from salem.fields import fixture


def test_examples(gaussian):
    q = gaussian.element([1, 2])
    assert exp_sum_bruteforce(q, [1, -2]) == pytest.approx(5, abs=1e-12)
    assert abs(exp_sum_bruteforce(q, [1, 2])) <= 1e-12
    assert exp_sum_bruteforce(gaussian.element([3, 1]), [0, 0]) == pytest.approx(10)
    assert integrality_criterion(q, [1, -2]) is Criterion.INTEGRAL
    assert integrality_criterion(gaussian.element([2, 0]), [1, 0]) is Criterion.NON_INTEGRAL
    assert integrality_criterion(q, [0, 0]) is Criterion.INTEGRAL


def test_table_matches_single(cbrt2):
    q = cbrt2.element([2, -1, 1])
    S = np.array([[1, 2, 3], [0, 0, 0], [-4, 5, 11]])
    tab = exp_sum_table(q, S)
    for s, v in zip(S, tab):
        assert v == pytest.approx(exp_sum_bruteforce(q, s), abs=1e-10)


@pytest.mark.parametrize("name", ["gaussian", "zeta8", "sqrt2", "cbrt2"])
@given(data=st.data())
def test_dichotomy(name, data):
    ctx = fixture(name)
    q = ctx.element(data.draw(st.lists(st.integers(-4, 4), min_size=ctx.n, max_size=ctx.n).filter(any)))
    s = data.draw(st.lists(st.integers(-12, 12), min_size=ctx.n, max_size=ctx.n))
    assert abs(exp_sum_bruteforce(q, s) - predicted_sum(q, s)) <= 1e-9
    assert weak_vanishing_direction_holds(q, s)
