"""Bound evaluators, rate fits, envelopes, scaling identities."""

import numpy as np
import pytest

import torusmix as tm
from torusmix.analysis import (
    BoundParams,
    algebraic_floor,
    fit_decay_rate,
    fit_envelope,
    lower_bound_curve,
    rate_vs_parameter,
    scaling_check,
    scaling_fixture,
    smooth_r1_choice,
    upscale_field,
)
from torusmix.norms import CostAccumulator, MixTimeSeries


def synthetic_series(rate, amp=1.0, t_end=5.0, n_samples=60, grad2=1.0):
    series = MixTimeSeries(p_list=(2.0,))
    for t in np.linspace(0.0, t_end, n_samples):
        series.append(t, amp * np.exp(-rate * t), 1.0, {2.0: grad2}, 0.0)
    return series


class TestRateFit:
    def test_exact_exponential(self):
        fit = fit_decay_rate(synthetic_series(2.0), (0.0, 5.0))
        assert fit.slope == pytest.approx(-2.0, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
        assert fit.rate_reciprocal == pytest.approx(0.5, abs=1e-12)

    def test_amplitude_and_rate_recovered(self):
        fit = fit_decay_rate(synthetic_series(0.3, amp=5.0), (0.0, 5.0))
        assert fit.slope == pytest.approx(-0.3, abs=1e-12)
        assert fit.intercept == pytest.approx(np.log(5.0), abs=1e-12)

    def test_window_restriction(self):
        fit = fit_decay_rate(synthetic_series(1.0), (1.0, 4.0))
        assert fit.t0 == 1.0 and fit.t1 == 4.0
        assert fit.n_samples < 60

    def test_insufficient_samples(self):
        with pytest.raises(tm.InsufficientDataError):
            fit_decay_rate(synthetic_series(1.0, n_samples=5), (0.0, 5.0))
        with pytest.raises(tm.InsufficientDataError):
            fit_decay_rate(synthetic_series(1.0), (4.9, 4.95))

    def test_nonpositive_mix_norm_rejected(self):
        series = MixTimeSeries(p_list=(2.0,))
        for i, t in enumerate(np.linspace(0, 1, 20)):
            series.append(t, 1.0 - 0.06 * i if i < 19 else 0.0, 1.0, {2.0: 1.0}, 0.0)
        series.h_neg1[-1] = 0.0
        with pytest.raises(tm.InsufficientDataError):
            fit_decay_rate(series, (0.0, 1.0))


class TestLowerBoundCurve:
    def params(self, **kw):
        base = dict(
            eps0=0.1, c=1.5, r0=0.2, p=2.0, measure_a=0.3, linf_norm=2.0,
            r1=0.25, n_balls=1,
        )
        base.update(kw)
        return BoundParams(**base)

    def test_zero_cost_gives_flat_prefactor(self):
        params = self.params()
        acc = CostAccumulator(p=2.0)
        acc.add(0.0, 0.0)
        acc.add(1.0, 0.0)
        acc.add(2.0, 0.0)
        curve = lower_bound_curve(params, acc)
        expect = 0.1 * 0.2**2 * 2.0  # eps0 * r0^(d/2+1) * linf, d=2
        for _, b, bp in curve:
            assert b == pytest.approx(expect, rel=1e-12)
            assert bp == pytest.approx(0.1 * 0.25**2 * 2.0, rel=1e-12)

    def test_constant_integrand_is_exact_exponential(self):
        params = self.params()
        acc = CostAccumulator(p=2.0)
        for t in np.linspace(0, 3, 31):
            acc.add(t, 4.0)  # ||grad u|| = F = 4
        curve = lower_bound_curve(params, acc)
        coeff = 1.5 / 0.3 ** (1.0 / 2.0)
        for t, b, _ in curve:
            assert b == pytest.approx(
                params.prefactor * np.exp(-coeff * 4.0 * t), rel=1e-10
            )

    def test_curve_non_increasing_for_nonnegative_integrand(self):
        params = self.params()
        acc = CostAccumulator(p=2.0)
        rng = np.random.default_rng(7)
        for i, t in enumerate(np.linspace(0, 2, 20)):
            acc.add(t, float(rng.uniform(0.0, 3.0)))
        curve = lower_bound_curve(params, acc)
        vals = [b for _, b, _ in curve]
        assert all(v1 >= v2 - 1e-15 for v1, v2 in zip(vals, vals[1:]))

    def test_p_mismatch_rejected(self):
        params = self.params()
        acc = CostAccumulator(p=1.0)
        acc.add(0.0, 1.0)
        with pytest.raises(tm.ParamMismatchError):
            lower_bound_curve(params, acc)

    def test_kappa_window_enforced(self):
        with pytest.raises(tm.ConfigError):
            self.params(level=0.5, kappa=0.4)  # needs kappa < 1/3

    def test_single_ball_radius_from_gradient(self):
        g = tm.GridSpec(256)
        theta0 = tm.initial_data(0.75, g)
        r1 = smooth_r1_choice(theta0)
        assert 0.0 < r1 < 1.0
        params = self.params(r1=r1)
        assert params.prime_prefactor > 0.0
        assert params.prime_rate_coeff > 0.0


class TestEnvelope:
    def test_envelope_lower_bounds_noisy_exponential(self):
        rng = np.random.default_rng(3)
        series = MixTimeSeries(p_list=(2.0,))
        for t in np.linspace(0.0, 5.0, 80):
            wobble = 1.0 + 0.05 * rng.standard_normal()
            series.append(t, 0.5 * np.exp(-0.8 * t) * abs(wobble), 1.0, {2.0: 1.0}, 0.0)
        env = fit_envelope(series, 2.0, (0.0, 5.0))
        assert env.holds
        assert env.margin >= 0.0
        assert env.rate_coeff == pytest.approx(0.8, rel=0.2)

    def test_exact_exponential_touches(self):
        env = fit_envelope(synthetic_series(1.2, amp=2.0), 2.0, (0.0, 5.0))
        assert env.holds
        assert env.prefactor == pytest.approx(2.0, rel=1e-6)


class TestRateTable:
    def test_linear_relationship_recovered(self):
        fits = []
        for a in (0.5, 0.6, 0.7, 0.8):
            rate = 1.0 / (2.0 * a)  # rate_reciprocal = 2a, exactly linear
            fits.append((a, fit_decay_rate(synthetic_series(rate), (0.0, 5.0))))
        table = rate_vs_parameter(fits)
        assert not table.degenerate
        assert table.slope == pytest.approx(2.0, abs=1e-9)
        assert table.r_squared == pytest.approx(1.0, abs=1e-9)

    def test_single_member_flagged(self):
        fits = [(0.5, fit_decay_rate(synthetic_series(1.0), (0.0, 5.0)))]
        table = rate_vs_parameter(fits)
        assert table.degenerate
        assert table.slope is None
        assert len(list(table.rows())) == 1


class TestAlgebraicFloor:
    def test_unit_ratio_returns_constant(self):
        # with cost = N the ratio is 1 and the floor equals C
        n_exp = 2.0  # d=2, gamma=0
        assert algebraic_floor(n_exp, p=2.0, dim=2, gamma=0.0, c=3.5) == pytest.approx(
            3.5, rel=1e-14
        )

    def test_power_law_in_cost(self):
        # d=2, p=2, gamma=0 -> N=2, exponent pN/d = 2: floor scales as cost^2
        f1 = algebraic_floor(1.0, p=2.0, dim=2, gamma=0.0)
        f2 = algebraic_floor(2.0, p=2.0, dim=2, gamma=0.0)
        assert f2 / f1 == pytest.approx(2.0 ** 2, rel=1e-12)
        costs = np.linspace(0.5, 4.0, 8)
        vals = [algebraic_floor(w, p=2.0, dim=2, gamma=0.0) for w in costs]
        assert all(v1 < v2 for v1, v2 in zip(vals, vals[1:]))

    def test_zero_cost_rejected(self):
        with pytest.raises(tm.ZeroCostError):
            algebraic_floor(0.0)

    def test_nonpositive_exponent_rejected(self):
        with pytest.raises(tm.ConfigError):
            algebraic_floor(1.0, dim=2, gamma=-3.0)


class TestScalingCheck:
    def test_identity_scale_is_exact(self):
        g = tm.GridSpec(128)
        theta, u = scaling_fixture(g, 1.0)
        rep = scaling_check(theta, u, 1.0)
        assert rep.mix_norm_mismatch == 0.0
        assert rep.grad_norm_mismatch == 0.0

    def test_half_scale_identities(self):
        g = tm.GridSpec(256)
        theta, u = scaling_fixture(g, 0.5)
        rep = scaling_check(theta, u, 0.5, p=2.0)
        assert rep.mix_norm_mismatch < 1e-3
        assert rep.grad_norm_mismatch < 1e-3
        # d=2, p=2: the gradient-norm ratio a^(d/p-1) is exactly 1
        assert rep.grad_norm_small == pytest.approx(rep.grad_norm_big, rel=1e-6)

    def test_mismatch_decreases_with_resolution(self):
        reps = []
        for n in (128, 256):
            g = tm.GridSpec(n)
            theta, u = scaling_fixture(g, 0.5)
            reps.append(scaling_check(theta, u, 0.5))
        assert reps[1].mix_norm_mismatch < reps[0].mix_norm_mismatch

    def test_nontrivial_gradient_exponent(self):
        g = tm.GridSpec(256)
        theta, u = scaling_fixture(g, 0.5)
        rep = scaling_check(theta, u, 0.5, p=4.0)
        assert rep.grad_norm_mismatch < 1e-3
        # a^(d/p-1) = 2^(1/2): the two raw norms genuinely differ
        assert rep.grad_norm_small / rep.grad_norm_big == pytest.approx(
            0.5 ** (2 / 4 - 1), rel=1e-3
        )

    def test_support_violation_detected(self):
        g = tm.GridSpec(128)
        theta, u = scaling_fixture(g, 1.0)  # fills the whole cell
        with pytest.raises(tm.SupportViolationError):
            scaling_check(theta, u, 0.5)

    def test_non_reciprocal_scale_rejected(self):
        g = tm.GridSpec(128)
        theta, u = scaling_fixture(g, 0.4)
        with pytest.raises(tm.ConfigError):
            scaling_check(theta, u, 0.4)

    def test_upscale_exact_on_band_limited_fields(self):
        # stretching sin(4 pi x) by 2 must give exactly sin(2 pi x)
        g = tm.GridSpec(64)
        x, _ = g.coordinates()
        f = tm.ScalarField.from_values(g, np.sin(4 * np.pi * x))
        big = upscale_field(f, 2)
        assert np.abs(big.values - np.sin(2 * np.pi * x)).max() < 1e-12
