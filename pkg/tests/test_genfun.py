"""Forward-mode duals, geometric sums, and the interval transforms."""

import math

import pytest

import laacap as L
from laacap.genfun import (Dual, GenFunDomainError, big_f_value, geom_sum,
                           gexp, glog, gpow, slot_pgf_from_atoms)
from _pins import PGF_MC_T1, PGF_MC_T3_EPS0, PGF_MC_T3_EPS005


def _fd(fn, z, h=1e-7):
    return (fn(z + h) - fn(z - h)) / (2.0 * h)


def test_dual_arithmetic_matches_finite_differences():
    def expr(x):
        return (2.0 - x) / (x * x + 1.0) + x * (x - 3.0) - 1.0 / x + (-x)

    x0 = 1.7
    d = expr(Dual(x0, 1.0))
    assert d.val == pytest.approx(expr(x0), rel=1e-12)
    assert d.der == pytest.approx(_fd(expr, x0), rel=1e-6)


def test_dual_special_functions():
    x0 = 0.9
    for fn in (gexp, glog, lambda t: gpow(t, 2.7)):
        d = fn(Dual(x0, 1.0))
        assert d.val == pytest.approx(fn(x0), rel=1e-12)
        assert d.der == pytest.approx(_fd(fn, x0), rel=1e-6)
    with pytest.raises(ValueError):
        glog(0.0)
    with pytest.raises(ValueError):
        glog(Dual(-1.0, 1.0))


def test_saturation_returns_inf_instead_of_raising():
    assert gexp(800.0) == math.inf
    d = gexp(Dual(800.0, 1.0))
    assert d.val == math.inf and d.der == math.inf
    assert gpow(2.0, 5000.0) == math.inf
    assert gpow(0.0, 2.0) == 0.0
    assert gpow(0.0, -1.0) == math.inf
    assert gpow(math.inf, 2.0) == math.inf
    assert gpow(math.inf, -2.0) == 0.0
    big = geom_sum(4.0, 10 ** 6)
    assert big == math.inf


def test_geom_sum_matches_direct_sum_across_series_switch():
    w = 16
    # straddle the series branch boundary at |z - 1| = 1e-5
    for h in (-2e-5, -5e-6, -1e-9, 0.0, 1e-9, 5e-6, 2e-5, 0.3):
        z = 1.0 + h
        direct = sum(z ** m for m in range(w))
        assert geom_sum(z, w) == pytest.approx(direct, rel=1e-12)


def test_geom_sum_derivative_near_one():
    w = 32

    def fn(z):
        return geom_sum(z, w)

    for z0 in (1.0, 1.0 + 4e-6, 1.0 + 4e-5):
        d = geom_sum(Dual(z0, 1.0), w)
        assert d.der == pytest.approx(_fd(fn, z0), rel=1e-6)
    # derivative at 1 is sum of 0..w-1
    assert geom_sum(Dual(1.0, 1.0), w).der == pytest.approx(
        w * (w - 1) / 2.0, rel=1e-12)


def test_backoff_pgf_mean_counts_from_zero():
    params = L.SystemParams(mode=L.FCW)
    g = L.eta_hat(0, params)
    assert g.value(1.0) == pytest.approx(1.0, abs=1e-14)
    assert g.mean() == pytest.approx((16 - 1) / 2.0, rel=1e-12)
    vcw = L.SystemParams(mode=L.VCW)
    g3 = L.eta_hat(3, vcw)
    assert g3.mean() == pytest.approx((128 - 1) / 2.0, rel=1e-12)
    with pytest.raises(ValueError):
        L.eta_hat(params.k_retry_laa, params)


def test_slot_pgf_mixture():
    atoms = [(10.0, 0.5), (100.0, 0.25), (1000.0, 0.25), (55.0, 0.0)]
    g = slot_pgf_from_atoms(atoms)
    assert g.value(1.0) == pytest.approx(1.0, abs=1e-14)
    assert g.mean() == pytest.approx(0.5 * 10 + 0.25 * 100 + 0.25 * 1000,
                                     rel=1e-12)
    z = 1.00001
    assert g.value(z) == pytest.approx(
        0.5 * z ** 10 + 0.25 * z ** 100 + 0.25 * z ** 1000, rel=1e-13)


def test_transform_normalization_and_mean_identities(both_setups):
    for mode, (params, cp, transforms) in both_setups.items():
        sd, slot, t1, t2, t3 = transforms
        tau = sd.mean_us()
        p = cp.p_laa
        kl = params.k_retry_laa
        ws = [params.window_laa(j) for j in range(kl)]
        for g in (slot, t1, t2, t3):
            assert g.value(1.0) == pytest.approx(1.0, abs=1e-12), (mode, g.tag)
        assert slot.mean() == pytest.approx(tau, rel=1e-12)
        # mean of the drop interval: K collision slots plus K backoff stages
        m2 = kl * params.t_c_us + sum((w - 1) / 2.0 for w in ws) * tau
        assert t2.mean() == pytest.approx(m2, rel=1e-10), mode
        # mean of the delivery interval, conditioned on delivery
        norm = 1.0 - p ** kl
        m1 = sum(
            (1.0 - p) * p ** i / norm
            * (i * params.t_c_us
               + sum((w - 1) / 2.0 for w in ws[:i + 1]) * tau)
            for i in range(kl))
        assert t1.mean() == pytest.approx(m1, rel=1e-10), mode
        # renewal identity for the whole gap between successes
        big_p = p ** kl
        assert t3.mean() == pytest.approx(
            m1 + big_p / (1.0 - big_p) * m2, rel=1e-10), mode


def test_transform_derivative_matches_finite_difference(both_setups):
    for mode, (params, cp, transforms) in both_setups.items():
        sd, slot, t1, t2, t3 = transforms
        for g in (t1, t2, t3):
            for z0 in (1.00001, 1.000001, 1.0000001):
                v, d = g.value_and_derivative(z0)
                fd = _fd(g.value, z0, h=1e-9 * z0)
                assert d == pytest.approx(fd, rel=1e-5), (mode, g.tag, z0)


def test_gap_transform_pole_bracketing(both_setups):
    for mode, (params, cp, transforms) in both_setups.items():
        t3 = transforms[4]
        x_max = t3.log_z_max()
        assert 0.0 < x_max < 1e-3
        assert t3.denominator(math.exp(x_max * (1.0 - 1e-9))) > 0.0
        assert t3.denominator(math.exp(x_max * (1.0 + 1e-9))) <= 0.0
        with pytest.raises(GenFunDomainError):
            t3.value(math.exp(x_max * 1.01))
        assert big_f_value(x_max * 1.01, t3, params) == math.inf
        assert math.isfinite(big_f_value(x_max * 0.5, t3, params))


def test_gap_transform_without_retry_limit_has_no_pole():
    # with K large enough that p**K underflows to 0 and per = 0 there is
    # no geometric denominator, so the convergence bound is infinite
    params = L.SystemParams(n_laa=1, m_wifi=0)
    cp = L.solve_fixed_point(params)
    sd, slot, t1, t2, t3 = L.build_transforms(params, cp)
    assert cp.p_laa == 0.0
    assert t3.log_z_max() == math.inf


def test_big_f_at_zero_and_growth(fcw_setup):
    params, cp, transforms = fcw_setup
    t3 = transforms[4]
    v0, d0 = L.big_f(0.0, t3, params)
    assert v0 == pytest.approx(0.0, abs=1e-12)
    assert d0 == pytest.approx(t3.mean() + params.t_f_us, rel=1e-10)
    xs = [1e-6, 1e-5, 5e-5, 1e-4]
    prev = 0.0
    for x in xs:
        v, d = L.big_f(x, t3, params)
        assert v == pytest.approx(big_f_value(x, t3, params), rel=1e-13)
        assert d > 0.0
        assert v > prev
        prev = v
    with pytest.raises(ValueError):
        L.big_f(-1e-9, t3, params)
    with pytest.raises(ValueError):
        big_f_value(-1e-9, t3, params)


def _assert_within_3_sigma(value, pin, label):
    mean, se = pin
    assert abs(value - mean) <= 3.0 * se, (label, value, mean, se)


def test_delivery_transform_against_sampled_moments(fcw_setup):
    params, cp, transforms = fcw_setup
    t1 = transforms[2]
    _assert_within_3_sigma(t1.mean(), PGF_MC_T1["mean"], "t1 mean")
    for x in (1e-9, 1e-5):
        _assert_within_3_sigma(t1.value(math.exp(x)), PGF_MC_T1[x],
                               f"t1 at {x}")


def test_gap_transform_against_sampled_moments(fcw_setup):
    params, cp, transforms = fcw_setup
    t3 = transforms[4]
    _assert_within_3_sigma(t3.mean(), PGF_MC_T3_EPS0["mean"], "t3 mean")
    for x in (1e-9, 1e-5):
        _assert_within_3_sigma(t3.value(math.exp(x)), PGF_MC_T3_EPS0[x],
                               f"t3 at {x}")


def test_gap_transform_with_frame_errors_against_sampled_moments(fcw_setup):
    params, cp, transforms = fcw_setup
    slot = transforms[1]
    pe = params.with_(per=0.05)
    t3e = L.t3_hat(pe, cp, slot)
    assert t3e.value(1.0) == pytest.approx(1.0, abs=1e-12)
    _assert_within_3_sigma(t3e.mean(), PGF_MC_T3_EPS005["mean"], "t3 eps mean")
    for x in (1e-9, 1e-5):
        _assert_within_3_sigma(t3e.value(math.exp(x)), PGF_MC_T3_EPS005[x],
                               f"t3 eps at {x}")
    # frame errors lengthen the gap
    assert t3e.mean() > transforms[4].mean()
