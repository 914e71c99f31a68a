import itertools
import math

import numpy as np
import pytest
from scipy.signal import convolve2d

from salem.bump import bump_profile
from salem.errors import BoundViolated, ConfigInvalid, EmptyBand, HypothesisViolated, InsufficientSupport
from salem.iterate import (Schedule, check_convolution_stability, check_induction, convolve_tables,
                           convolve_with_scale, decay_fit, induction_envelope, iterate_schedule,
                           support_radius_for_budget, tail_cutoff, truncation_bound)
from salem.measure import FourierTable, analytic_table, build_scale_function


def radial_table(S, fn, n=2):
    ax = np.arange(-S, S + 1)
    grids = np.meshgrid(*([ax] * n), indexing="ij")
    r = np.sqrt(sum(g.astype(float) ** 2 for g in grids))
    return FourierTable(fn(r), {"tail_l1": 0.0})


def brute_convolution(f, g, S_max):
    out = np.zeros((2 * S_max + 1,) * f.n, dtype=complex)
    for s in itertools.product(range(-S_max, S_max + 1), repeat=f.n):
        acc = 0
        for t in itertools.product(range(-f.S, f.S + 1), repeat=f.n):
            u = tuple(a - b for a, b in zip(s, t))
            if max(map(abs, u)) <= g.S:
                acc += f.at(t) * g.at(u)
        out[tuple(x + S_max for x in s)] = acc
    return out


def test_schedule_defaults():
    sc = Schedule(1.0, 0.15, [4, 8, 16])
    assert sc.deltas == pytest.approx([0.15 / 4, 0.15 / 8, 0.15 / 16])
    assert sc.Delta(2) == pytest.approx(2 * (0.15 / 4 + 0.15 / 8))
    assert sc.Delta(3) < sc.delta_star


@pytest.mark.parametrize("kw", [
    dict(tau=0.5), dict(M=[4, 4]), dict(M=[5, 8]), dict(deltas=[0.01, 0.02]),
    dict(deltas=[0.05, 0.04]), dict(growth=-1.0), dict(delta_star=0.0),
])
def test_schedule_validation(kw):
    args = dict(tau=1.0, delta_star=0.15, M=[4, 8])
    args.update(kw)
    with pytest.raises(ConfigInvalid):
        Schedule(**args)


def test_tail_cutoff():
    b = bump_profile(2)
    m = tail_cutoff(b, 16.0, 4.0 - 0.075)
    r = np.linspace(m, b.rho_max * 16.0 * 0.999, 20000)
    assert np.all(np.abs(b.phi_hat(r / 16.0)) <= r ** -(4.0 - 0.075))


def test_envelope_pieces():
    r = np.array([0.0, 2.0, 100.0])
    env = induction_envelope(r, 1, 2, 1.0, 0.1, 50.0, 4.0)
    assert env[0] == math.inf
    assert env[1] == pytest.approx(1.0 * 2.0 ** (-1 + 0.1))
    assert env[2] == pytest.approx(100.0 ** (-3.9))


def test_direct_convolution_matches_brute():
    rng = np.random.default_rng(0)
    f = FourierTable(rng.normal(size=(3, 3)), {"tail_l1": 0.0})
    g = FourierTable(rng.normal(size=(9, 9)), {"tail_l1": 0.0})
    h = convolve_tables(f, g, 3)
    assert np.allclose(h.values, brute_convolution(f, g, 3), atol=1e-12)


def test_fft_convolution_matches_brute():
    rng = np.random.default_rng(1)
    f = FourierTable(rng.normal(size=(5, 5)), {"tail_l1": 0.0})
    g = FourierTable(rng.normal(size=(41, 41)), {"tail_l1": 0.0})
    h = convolve_tables(f, g, 18)
    assert np.allclose(h.values, brute_convolution(f, g, 18), atol=1e-11)


def test_blocked_matches_table(gaussian):
    g = analytic_table(build_scale_function(gaussian, 4, 1.0), 100)
    g.meta["tail_l1"] = 0.0
    sf = build_scale_function(gaussian, 16, 1.0)
    a = convolve_with_scale(g, sf, 60, block=37)
    b = convolve_tables(g, analytic_table(sf, 160), 60)
    assert np.abs(a.values - b.values).max() <= 1e-13


def test_truncation_budget():
    f = FourierTable(np.ones((3, 3)), {"tail_l1": 1e-3})
    g = FourierTable(np.ones((9, 9)), {"tail_l1": 0.0})
    assert truncation_bound(f, g, 2) == pytest.approx(1e-3)
    with pytest.raises(InsufficientSupport):
        convolve_tables(f, g, 2)
    with pytest.raises(InsufficientSupport):
        convolve_tables(f, g, 20)


def test_support_radius_budget(gaussian):
    sf = build_scale_function(gaussian, 4, 1.0)
    S = support_radius_for_budget(sf, 1e-6)
    assert 16 < S < 5000


def test_decay_fit_synthetic():
    t = radial_table(300, lambda r: np.where(r > 0, 1.0 / np.maximum(r, 1e-9), 1.0))
    assert decay_fit(t, 2.0, 256.0)["slope"] == pytest.approx(-1.0, abs=0.02)
    c = radial_table(100, lambda r: np.full(r.shape, 0.3))
    assert decay_fit(c, 2.0, 64.0)["slope"] == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(EmptyBand):
        decay_fit(radial_table(20, lambda r: 0.0 * r), 2.0, 16.0)


def test_stability_hypotheses(gaussian):
    f = analytic_table(build_scale_function(gaussian, 16, 1.0), 40)
    g = radial_table(80, lambda r: np.minimum(1.0, np.maximum(r, 1e-9) ** -5.0))
    with pytest.raises(HypothesisViolated):
        check_convolution_stability(f, g, M=16, m=2.0, delta=0.05, eps=0.05, eta=0.6, tau=1.0)
    bad = FourierTable(f.values * 2.0, {})
    with pytest.raises(HypothesisViolated):
        check_convolution_stability(bad, g, M=16, m=2.0, delta=0.05, eps=0.05, eta=0.1, tau=1.0)


def test_stability_margins_recomputed(gaussian):
    f = analytic_table(build_scale_function(gaussian, 16, 1.0), 40)
    g = radial_table(80, lambda r: np.minimum(1.0, np.maximum(r, 1e-9) ** -5.0))
    rep = check_convolution_stability(f, g, M=16, m=2.0, delta=0.05, eps=0.05, eta=0.4, tau=1.0)
    h = np.abs(convolve2d(f.values, g.values))[80:161, 80:161]
    r = radial_table(40, lambda r: r).values
    med = (r >= 16 ** 0.25 / 100) & (r <= math.exp(16))
    env = np.where(r > 0, r, 1.0) ** (-1.0 + 0.1 + 0.05)
    assert rep["medium"]["margin"] == pytest.approx((env - h)[med].min(), abs=1e-12)
    assert rep["ok"] == (min(rep["small"]["margin"], rep["medium"]["margin"], rep["large"]["margin"]) >= 0)


def test_induction_on_delta():
    sc = Schedule(1.0, 0.15, [4])
    t = radial_table(10, lambda r: (r == 0).astype(float))
    rep = check_induction(t, 1, sc, bump_profile(2))
    assert rep["small_s"]["margin"] > 0


def test_first_step_violation_raises(gaussian):
    with pytest.raises(BoundViolated):
        iterate_schedule(gaussian, Schedule(1.0, 0.15, [4, 8]), 64, strict=True)


@pytest.mark.slow
def test_perturbation_example(gaussian):
    res = iterate_schedule(gaussian, Schedule(1.0, 0.15, [8, 64], deltas=[0.025, 0.0125]), 8, strict=False)
    pert = res[-1].report["perturbation"]
    assert pert["margin"] >= 0
    assert res[-1].report["induction"]["truncation_bound"] <= 1e-6
