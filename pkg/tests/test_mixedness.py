"""Level sets, mixedness verdicts, scale scans, duality certificate."""

import numpy as np
import pytest

import torusmix as tm
from torusmix.mixedness import LevelSetMask, bump_test_function

from conftest import brute_force_ball_counts, grid64, sine_field


def checkerboard_mask(grid, period=1 / 8):
    x, y = grid.coordinates()
    m = 2.0 * np.pi / period
    ind = ((np.sin(m * x) * np.sin(m * y)) > 0).astype(float)
    return LevelSetMask(grid, ind, 0.5, float(ind.mean()))


def stripe_mask(grid):
    x, _ = grid.coordinates()
    ind = (x < 0.5).astype(float)
    return LevelSetMask(grid, ind, 0.5, float(ind.mean()))


class TestSuperLevelSet:
    def test_sine_half_level_stripe(self):
        # {sin(2 pi x) > 1/2} = (1/12, 5/12), measure 1/3
        g = tm.GridSpec(128)
        mask = tm.super_level_set(sine_field(g), 0.5)
        assert mask.measure == pytest.approx(1.0 / 3.0, abs=2.0 / g.n)
        x, _ = g.coordinates()
        inside = (x > 1 / 12 + 1.5 / g.n) & (x < 5 / 12 - 1.5 / g.n)
        assert np.all(mask.indicator[inside] == 1.0)
        outside = (x < 1 / 12 - 1.5 / g.n) | (x > 5 / 12 + 1.5 / g.n)
        assert np.all(mask.indicator[outside] == 0.0)

    def test_level_one_is_empty(self):
        mask = tm.super_level_set(sine_field(grid64()), 1.0)
        assert mask.measure == 0.0

    def test_zero_field_rejected(self):
        with pytest.raises(tm.ZeroFieldError):
            tm.super_level_set(tm.ScalarField.zeros(grid64()), 0.5)

    def test_many_thin_stripes(self):
        # f = sin(2 pi x) + 10 sin(2 pi m x): level 5/max gives m thin stripes
        g = tm.GridSpec(256)
        x, _ = g.coordinates()
        m = 8
        f = tm.ScalarField.from_values(
            g, np.sin(2 * np.pi * x) + 10.0 * np.sin(2 * np.pi * m * x)
        )
        linf = float(np.abs(f.values).max())
        mask = tm.super_level_set(f, 5.0 / linf)
        col = mask.indicator[:, 0]
        n_stripes = int(np.sum(np.diff(np.concatenate([col, col[:1]])) > 0))
        assert n_stripes == m
        widths = []
        run = 0
        for v in np.concatenate([col, col[:1]]):
            if v:
                run += 1
            elif run:
                widths.append(run)
                run = 0
        assert max(widths) - min(widths) <= 2  # near-equal widths


class TestMixednessVerdicts:
    def test_whole_torus_never_semi_mixed(self):
        g = grid64()
        mask = LevelSetMask(g, np.ones(g.shape), 0.5, 1.0)
        for delta in (1 / 16, 1 / 4):
            for kappa in (0.1, 0.4):
                rep = tm.is_semi_mixed(mask, delta, kappa)
                assert not rep.semi_mixed
                assert rep.worst_fraction == 1.0

    def test_empty_set_always_semi_mixed(self):
        g = grid64()
        mask = LevelSetMask(g, np.zeros(g.shape), 0.5, 0.0)
        rep = tm.is_semi_mixed(mask, 1 / 8, 0.3)
        assert rep.semi_mixed and rep.worst_fraction == 0.0
        rep = tm.is_mixed(mask, 1 / 8, 0.3)
        assert not rep.mixed  # complement is the whole torus

    def test_half_stripe_fails(self):
        g = grid64()
        rep = tm.is_semi_mixed(stripe_mask(g), 1 / 8, 0.3)
        assert not rep.semi_mixed
        assert rep.worst_fraction == 1.0
        assert rep.worst_center[0] < 0.5  # the saturated ball sits in the stripe
        assert not tm.is_mixed(stripe_mask(g), 1 / 8, 0.3).mixed

    def test_checkerboard_is_mixed(self):
        g = grid64()
        rep = tm.is_mixed(checkerboard_mask(g), 1 / 4, 0.4)
        assert rep.semi_mixed and rep.mixed

    def test_complementarity(self, rng):
        g = tm.GridSpec(32)
        for _ in range(5):
            ind = (rng.random(g.shape) < rng.uniform(0.2, 0.8)).astype(float)
            mask = LevelSetMask(g, ind, 0.5, float(ind.mean()))
            delta, kappa = 4 / 32, 0.3
            both = tm.is_mixed(mask, delta, kappa)
            semi = tm.is_semi_mixed(mask, delta, kappa)
            co_semi = tm.is_semi_mixed(mask.complement(), delta, kappa)
            assert both.mixed == (semi.semi_mixed and co_semi.semi_mixed)
            assert both.worst_fraction == semi.worst_fraction

    def test_translation_equivariance(self, rng):
        g = tm.GridSpec(32)
        ind = (rng.random(g.shape) < 0.3).astype(float)
        # pin a unique worst ball by filling one disk solid
        r = g.periodic_distance((0.25, 0.25))
        ind[r <= 4 / 32] = 1.0
        mask = LevelSetMask(g, ind, 0.5, float(ind.mean()))
        rep = tm.is_semi_mixed(mask, 4 / 32, 0.3)
        shift = (5, 11)
        rep_shift = tm.is_semi_mixed(mask.translated(shift), 4 / 32, 0.3)
        assert rep_shift.semi_mixed == rep.semi_mixed
        assert rep_shift.worst_fraction == rep.worst_fraction
        expected = (
            (rep.worst_center[0] + shift[0] / g.n) % 1.0,
            (rep.worst_center[1] + shift[1] / g.n) % 1.0,
        )
        assert rep_shift.worst_center == pytest.approx(expected, abs=1e-15)

    def test_verdicts_match_brute_force(self, rng):
        g = tm.GridSpec(32)
        ind = (rng.random(g.shape) < 0.35).astype(float)
        mask = LevelSetMask(g, ind, 0.5, float(ind.mean()))
        for delta in (3 / 32, 6 / 32):
            rep = tm.is_semi_mixed(mask, delta, 0.3)
            counts, size = brute_force_ball_counts(ind, delta)
            worst = counts.max() / size
            assert rep.worst_fraction == worst
            assert rep.semi_mixed == (worst <= 0.7)


class TestMixingScaleScan:
    def test_checkerboard_scale(self):
        g = grid64()
        scan = tm.mixing_scale_scan(
            checkerboard_mask(g), 0.4, [1 / 32, 1 / 16, 1 / 8, 1 / 4, 1 / 2]
        )
        assert scan.semi_mixing_scale in (1 / 8, 1 / 4)
        assert scan.r0_proxy is not None
        assert scan.r0_proxy < scan.semi_mixing_scale

    def test_whole_torus_has_no_scale(self):
        g = grid64()
        mask = LevelSetMask(g, np.ones(g.shape), 0.5, 1.0)
        scan = tm.mixing_scale_scan(mask, 0.3, [1 / 16, 1 / 8, 1 / 4])
        assert scan.semi_mixing_scale is None
        assert scan.r0_proxy == 1 / 4

    def test_thin_stripes_scale_tracks_stripe_width(self):
        g = tm.GridSpec(256)
        x, _ = g.coordinates()
        m = 8
        f = tm.ScalarField.from_values(
            g, np.sin(2 * np.pi * x) + 10.0 * np.sin(2 * np.pi * m * x)
        )
        mask = tm.super_level_set(f, 5.0 / float(np.abs(f.values).max()))
        scan = tm.mixing_scale_scan(
            mask, 0.3, [1 / 64, 1 / 32, 1 / 16, 1 / 8, 1 / 4]
        )
        # stripes repeat every 1/m; balls at that scale see mostly gap
        assert scan.semi_mixing_scale is not None
        assert scan.semi_mixing_scale <= 2.0 / m

    def test_json_export(self):
        g = grid64()
        scan = tm.mixing_scale_scan(checkerboard_mask(g), 0.4, [1 / 8, 1 / 4])
        payload = scan.to_json()
        assert "semi_mixing_scale" in payload


class TestCertificate:
    def test_zero_field(self):
        g = grid64()
        val = tm.h_neg1_certificate(tm.ScalarField.zeros(g), (0.5, 0.5), 0.1)
        assert val == 0.0

    def test_duality_soundness(self, rng):
        g = grid64()
        for _ in range(20):
            f = tm.random_band_limited(g, 20, rng)
            center = tuple(rng.random(2))
            delta = rng.uniform(2 / g.n, 0.25)
            eps = rng.uniform(0.1, 0.9)
            if delta * (1 + eps) > 0.5:
                continue
            cert = tm.h_neg1_certificate(f, center, delta, eps)
            assert cert <= tm.sobolev_norm(f, -1.0) * (1.0 + 1e-6)

    def test_cone_bump_within_factor(self):
        # cone profile of radius 0.2 minus its mean: the certificate from the
        # central ball recovers a sizable fraction of the true H^-1 norm
        g = tm.GridSpec(256)
        r = g.periodic_distance((0.5, 0.5))
        v = 1.0 - np.minimum(1.0, r / 0.2)
        v -= v.mean()
        f = tm.ScalarField.from_values(g, v)
        cert = tm.h_neg1_certificate(f, (0.5, 0.5), 0.1, eps=0.5)
        full = tm.sobolev_norm(f, -1.0)
        assert 0.1 * full <= cert <= full

    def test_annulus_must_fit(self):
        g = grid64()
        f = sine_field(g)
        with pytest.raises(tm.GeometryError):
            tm.h_neg1_certificate(f, (0.5, 0.5), 0.4, eps=0.5)

    def test_bump_profile_shape(self):
        g = tm.GridSpec(128)
        bump = bump_test_function(g, (0.5, 0.5), 0.125, 0.5)
        r = g.periodic_distance((0.5, 0.5))
        assert np.all(bump.values[r <= 0.125] == 1.0)
        assert np.all(bump.values[r >= 0.1875] == 0.0)
        mid = (r > 0.125) & (r < 0.1875)
        assert np.all((bump.values[mid] > 0.0) & (bump.values[mid] < 1.0))
