import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from scipy import signal

from drr.conf import DenbeConfig
from drr.dsp.estimator import (
    BinDrrSeries,
    DenbeEstimator,
    build_subband_weights,
    estimate_bin_drr,
    estimate_drr,
    estimate_subband_F,
    estimate_subband_G,
    integrate_fullband,
    to_db,
)
from drr.dsp.isim import render_reverberant
from drr.dsp.noise_psd import no_noise_estimate
from drr.dsp.signal_core import MultichannelAudio, StftConfig, iso_third_octave_grid
from drr.exceptions import ConfigurationError, ShapeError
from drr.tests.fixtures import FS, room, speech_like, white


def series(eta, usable=None, frequencies=None, integration_range=(0.0, 1e9)):
    eta = np.asarray(eta, dtype=float)
    return BinDrrSeries(
        eta=eta,
        usable=np.ones(len(eta), dtype=bool) if usable is None else np.asarray(usable),
        frequencies=np.arange(len(eta), dtype=float) if frequencies is None else frequencies,
        integration_range=integration_range,
    )


class BinRatioTests(SimpleTestCase):

    def test_recovers_ratio_of_synthetic_components(self):
        rng = np.random.default_rng(0)
        n = 100_000
        direct, reverberant = rng.uniform(0.1, 10.0, (2, n))
        gain_sq = rng.uniform(0.01, 1.0, n)
        mic_noise, out_noise = rng.uniform(0.0, 5.0, (2, n))
        bins = estimate_bin_drr(direct + reverberant + mic_noise, mic_noise,
                                gain_sq * reverberant + out_noise, out_noise,
                                gain_sq, np.ones(n, dtype=bool))
        self.assertTrue(np.all(bins.usable))
        np.testing.assert_allclose(bins.eta, direct / reverberant, rtol=1e-9)

    def test_matches_scalar_formula(self):
        rng = np.random.default_rng(1)
        n = 100_000
        y, v, zy, zv = rng.uniform(0.0, 10.0, (4, n))
        gain_sq = rng.uniform(0.01, 1.0, n)
        bins = estimate_bin_drr(y, v, zy, zv, gain_sq, np.ones(n, dtype=bool))
        expected = [(a - b) / ((1.0 / g) * (c - d)) - 1.0
                    for a, b, c, d, g in zip(y.tolist(), v.tolist(), zy.tolist(), zv.tolist(),
                                             gain_sq.tolist())]
        usable = bins.usable
        self.assertGreater(np.count_nonzero(usable), n // 5)
        np.testing.assert_allclose(bins.eta[usable], np.asarray(expected)[usable], rtol=1e-12)

    def test_more_output_power_lowers_the_ratio(self):
        rng = np.random.default_rng(2)
        n = 1000
        y = rng.uniform(5.0, 10.0, n)
        zy = rng.uniform(1.0, 2.0, n)
        gain_sq = rng.uniform(0.1, 1.0, n)
        zeros, usable = np.zeros(n), np.ones(n, dtype=bool)
        base = estimate_bin_drr(y, zeros, zy, zeros, gain_sq, usable)
        louder = estimate_bin_drr(y, zeros, zy * 1.01, zeros, gain_sq, usable)
        self.assertTrue(np.all(base.usable & louder.usable))
        self.assertTrue(np.all(louder.eta < base.eta))

    def test_single_bin_example(self):
        bins = estimate_bin_drr([2.0], [0.0], [1.0], [0.0], [1.0], [True])
        self.assertEqual(bins.eta[0], 1.0)

    def test_noise_only_bins_are_unusable(self):
        bins = estimate_bin_drr([3.0, 3.0], [3.0, 4.0], [1.0, 1.0], [0.0, 0.0],
                                [0.5, 0.5], [True, True])
        self.assertFalse(np.any(bins.usable))

    def test_no_reverberant_power_is_unusable(self):
        bins = estimate_bin_drr([3.0], [0.0], [1.0], [1.0], [0.5], [True])
        self.assertFalse(bins.usable[0])

    def test_shapes_must_agree(self):
        with self.assertRaises(ShapeError):
            estimate_bin_drr([1.0, 2.0], [0.0], [1.0], [0.0], [1.0], [True])


class IntegrationTests(SimpleTestCase):

    def test_constant_ratio(self):
        self.assertAlmostEqual(integrate_fullband(series(np.full(20, 1.0))), 0.0)
        self.assertAlmostEqual(integrate_fullband(series(np.full(20, 10.0))), 10.0)

    def test_linear_mean(self):
        self.assertAlmostEqual(integrate_fullband(series([1.0, 3.0])), 10 * math.log10(2.0))

    def test_only_usable_bins_in_range_count(self):
        bins = series([1.0, 100.0, 1.0, 100.0], usable=[True, False, True, True],
                      integration_range=(0.0, 2.0))
        self.assertAlmostEqual(integrate_fullband(bins), 0.0)

    def test_nothing_usable_reports_floor(self):
        with self.assertLogs('drr.dsp.estimator', level='WARNING'):
            value = integrate_fullband(series([1.0, 2.0], usable=[False, False]), floor_db=-25.0)
        self.assertEqual(value, -25.0)

    def test_clamping(self):
        self.assertEqual(integrate_fullband(series([1e6])), 30.0)
        self.assertEqual(to_db(1e-9, -20.0, 30.0), -20.0)
        self.assertEqual(to_db(-1.0, -20.0, 30.0), -20.0)
        self.assertEqual(to_db(math.inf, -20.0, 30.0), 30.0)
        self.assertEqual(to_db(math.nan, -20.0, 30.0), -20.0)

    def test_empty_integration_range(self):
        with self.assertRaises(ConfigurationError):
            series([1.0], integration_range=(500.0, 500.0))


class SubbandWeightTests(SimpleTestCase):

    def setUp(self):
        self.cfg = StftConfig(1024, 512)
        self.grid = iso_third_octave_grid(FS)
        self.weights = build_subband_weights(self.grid, self.cfg, FS)

    def test_bin_lands_in_its_band(self):
        self.assertEqual(self.cfg.frequencies(FS)[64], 1000.0)
        self.assertGreater(self.weights.weights[self.grid.band(1000.0), 64], 0.0)

    def test_rows_are_normalised(self):
        sums = self.weights.weights.sum(axis=1)
        np.testing.assert_allclose(sums[~self.weights.empty], 1.0)
        self.assertFalse(np.any(self.weights.empty))

    def test_low_bands_report_floor(self):
        cfg = StftConfig(512, 256)
        frequencies = cfg.frequencies(FS)
        bins = series(np.ones(cfg.bin_count), usable=frequencies >= 200.0,
                      frequencies=frequencies, integration_range=(200.0, 6300.0))
        result = estimate_subband_F(bins, build_subband_weights(self.grid, cfg, FS))
        for label in (100.0, 125.0, 160.0):
            position = self.grid.band(label)
            self.assertFalse(result.band_valid[position])
            self.assertEqual(result.per_band_db[position], -20.0)
        position = self.grid.band(1000.0)
        self.assertTrue(result.band_valid[position])
        self.assertAlmostEqual(result.per_band_db[position], 0.0)

    def test_matrix_must_fit_bins(self):
        with self.assertRaises(ShapeError):
            estimate_subband_F(series(np.ones(10)), self.weights)


class DenbeEstimatorTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        speech = speech_like(3.0, seed=11)
        cls.near = render_reverberant(room(source=(2.3, 2.2, 1.5)), speech)
        cls.far = render_reverberant(room(source=(2.3, 3.7, 1.5)), speech)
        cls.estimator = DenbeEstimator(FS)

    def assertInsideClamp(self, value):
        self.assertGreater(value, -20.0)
        self.assertLess(value, 30.0)

    def test_channels_differ(self):
        difference = np.max(np.abs(self.near.samples[0] - self.near.samples[1]))
        self.assertGreater(difference, 1e-3 * np.max(np.abs(self.near.samples[0])))

    def test_gain_invariance(self):
        for variant in ('C', 'D', 'E'):
            with self.subTest(variant=variant):
                base = self.estimator.estimate(self.near, variant).fullband_db
                scaled = self.estimator.estimate(self.near.scaled(1e3), variant).fullband_db
                self.assertInsideClamp(base)
                self.assertAlmostEqual(base, scaled, delta=1e-6)

    def test_band_gain_invariance(self):
        for variant in ('F', 'G'):
            with self.subTest(variant=variant):
                base = self.estimator.estimate(self.near, variant)
                scaled = self.estimator.estimate(self.near.scaled(1e3), variant)
                np.testing.assert_array_equal(scaled.band_valid, base.band_valid)
                np.testing.assert_allclose(scaled.per_band_db, base.per_band_db, atol=1e-6)

    def test_closer_source_gives_higher_estimate(self):
        near = self.estimator.estimate(self.near, 'C').fullband_db
        far = self.estimator.estimate(self.far, 'C').fullband_db
        self.assertInsideClamp(near)
        self.assertInsideClamp(far)
        self.assertGreater(near, far)

    def test_estimates_stay_in_clamp_range(self):
        for variant in ('C', 'D', 'E', 'F'):
            with self.subTest(variant=variant):
                result = self.estimator.estimate(self.near, variant)
                self.assertGreaterEqual(result.fullband_db, -20.0)
                self.assertLessEqual(result.fullband_db, 30.0)

    def test_zero_noise_estimate_reduces_to_variant_c(self):
        expected = self.estimator.estimate(self.near, 'C').fullband_db
        with mock.patch('drr.dsp.estimator.estimate_noise',
                        side_effect=lambda spec, method: no_noise_estimate(spec)):
            for variant in ('D', 'E'):
                with self.subTest(variant=variant):
                    self.assertEqual(self.estimator.estimate(self.near, variant).fullband_db,
                                     expected)

    def test_variant_f_reports_bands(self):
        result = self.estimator.estimate(self.near, 'F')
        self.assertTrue(result.has_bands)
        self.assertEqual(len(result.per_band_db), len(self.estimator.grid))
        self.assertEqual(result.band_centers, self.estimator.grid.labels)

    def test_variant_g_reports_bands(self):
        grid = self.estimator.grid
        result = estimate_subband_G(self.estimator.align(self.near), grid, self.estimator)
        self.assertEqual(result.variant, 'G')
        self.assertEqual(len(result.per_band_db), len(grid))
        self.assertFalse(np.any(result.band_valid[:3]))
        self.assertTrue(np.all(result.per_band_db[:3] == -20.0))
        self.assertTrue(np.any(result.band_valid))
        self.assertInsideClamp(result.fullband_db)

    def test_variant_g_agrees_with_f_at_1000_hz(self):
        band = self.estimator.grid.band(1000.0)
        for audio in (self.near, self.far):
            f_band = self.estimator.estimate(audio, 'F')
            g_band = self.estimator.estimate(audio, 'G')
            self.assertTrue(f_band.band_valid[band] and g_band.band_valid[band])
            self.assertInsideClamp(f_band.per_band_db[band])
            self.assertAlmostEqual(g_band.per_band_db[band], f_band.per_band_db[band], delta=1.0)

    def test_silent_band_reports_floor_in_variant_g(self):
        dry = white(3 * FS, seed=21)
        lowpass = signal.butter(16, 1000.0, 'lowpass', fs=FS, output='sos')
        dry = MultichannelAudio.mono(signal.sosfilt(lowpass, dry.samples[0]), FS)
        result = self.estimator.estimate(render_reverberant(room(), dry), 'G')
        band = self.estimator.grid.band(6300.0)
        self.assertFalse(result.band_valid[band])
        self.assertEqual(result.per_band_db[band], -20.0)
        self.assertTrue(result.band_valid[self.estimator.grid.band(500.0)])

    def test_unknown_variant(self):
        with self.assertRaises(ConfigurationError):
            self.estimator.estimate(self.near, 'H')

    def test_needs_two_channels(self):
        with self.assertRaises(ShapeError):
            estimate_drr(white(FS))

    def test_sample_rate_must_match(self):
        with self.assertRaises(ConfigurationError):
            DenbeEstimator(8000).analyse(self.near, 'none')

    def test_config_flows_into_design(self):
        estimator = DenbeEstimator(FS, DenbeConfig(mic_spacing_m=0.1, frame_ms=64.0))
        self.assertEqual(estimator.design.mic_spacing, 0.1)
        self.assertEqual(estimator.stft_config.frame_length, 1024)
