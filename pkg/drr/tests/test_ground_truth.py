import math

import numpy as np
from django.test import SimpleTestCase, tag
from scipy import signal

from drr.dsp.ground_truth import (
    AcousticImpulseResponse,
    airs_from_audio,
    airs_to_audio,
    compute_drr,
    compute_srr,
    compute_subband_drr,
    split_air,
)
from drr.dsp.isim import simulate_air
from drr.dsp.signal_core import MultichannelAudio, iso_third_octave_grid
from drr.exceptions import DegenerateInputError, DomainError, ShapeError
from drr.tests.fixtures import FS, room, white


def brute_force_drr(taps, fs=FS):
    peak = int(np.argmax(np.abs(taps)))
    half = int(round(0.0025 * fs))
    direct = sum(taps[n] ** 2 for n in range(len(taps)) if abs(n - peak) <= half)
    reverberant = sum(taps[n] ** 2 for n in range(len(taps)) if abs(n - peak) > half)
    return 10 * math.log10(direct / reverberant)


def tone_response(taps, frequency, fs=FS):
    phase = -2j * np.pi * frequency / fs * np.arange(len(taps))
    return abs(np.sum(taps * np.exp(phase))) ** 2


def filtered_energy(part, low, high, order=8, fs=FS):
    """Energy of ``part`` through the band-pass, evaluated on the FFT grid."""
    n = 2 * (len(part) + fs // 2)
    spectrum = np.abs(np.fft.rfft(part, n)) ** 2
    sos = signal.butter(order // 2, [low, high], btype='bandpass', fs=fs, output='sos')
    _, response = signal.sosfreqz(sos, worN=np.fft.rfftfreq(n, 1.0 / fs), fs=fs)
    weights = np.full(len(spectrum), 2.0)
    weights[0] = weights[-1] = 1.0
    return float(np.sum(weights * spectrum * np.abs(response) ** 2) / n)


def decaying_air(seed=0, length=4000, peak=100):
    rng = np.random.default_rng(seed)
    taps = 0.05 * rng.standard_normal(length) * np.exp(-np.arange(length) / 800.0)
    taps[:peak] = 0.0
    taps[peak] = 1.0
    return AcousticImpulseResponse(taps, FS)


class AirTests(SimpleTestCase):

    def test_default_direct_window(self):
        self.assertEqual(AcousticImpulseResponse([1.0], FS).direct_window, 40)
        self.assertEqual(AcousticImpulseResponse([1.0], 48000).direct_window, 120)

    def test_all_zero_air_has_no_direct_path(self):
        with self.assertRaises(DegenerateInputError):
            compute_drr(AcousticImpulseResponse(np.zeros(100), FS))

    def test_explicit_peak(self):
        air = AcousticImpulseResponse([0.0, 0.5, 1.0], FS, direct_peak=1, direct_window=1)
        self.assertEqual(air.peak, 1)

    def test_invalid_arguments(self):
        with self.assertRaises(ShapeError):
            AcousticImpulseResponse([], FS)
        with self.assertRaises(DomainError):
            AcousticImpulseResponse([1.0, np.inf], FS)
        with self.assertRaises(DomainError):
            AcousticImpulseResponse([1.0], FS, direct_peak=3)

    def test_audio_conversion_pads_to_longest(self):
        airs = [AcousticImpulseResponse([1.0, 0.5], FS), AcousticImpulseResponse([0.0, 1.0, 0.2], FS)]
        audio = airs_to_audio(airs)
        self.assertEqual(audio.samples.shape, (2, 3))
        restored = airs_from_audio(audio)
        np.testing.assert_array_equal(restored[0].taps, [1.0, 0.5, 0.0])


class DrrTests(SimpleTestCase):

    def test_unit_impulse_is_anechoic(self):
        taps = np.zeros(1000)
        taps[10] = 1.0
        self.assertEqual(compute_drr(AcousticImpulseResponse(taps, FS)), math.inf)

    def test_lone_impulse_is_all_direct(self):
        taps = np.zeros(500)
        taps[200] = 0.7
        direct, reverberant = split_air(AcousticImpulseResponse(taps, FS))
        np.testing.assert_array_equal(direct, taps)
        self.assertFalse(np.any(reverberant))

    def test_energy_ratio_examples(self):
        for reflection, expected in ((1.0, 0.0), (np.sqrt(0.1), 10.0)):
            taps = np.zeros(1000)
            taps[100] = 1.0
            taps[600] = reflection
            with self.subTest(expected=expected):
                self.assertAlmostEqual(compute_drr(AcousticImpulseResponse(taps, FS)), expected, places=9)

    def test_split_reconstructs_air(self):
        air = decaying_air(1)
        direct, reverberant = split_air(air)
        np.testing.assert_array_equal(direct + reverberant, air.taps)
        self.assertFalse(np.any(direct * reverberant))
        self.assertEqual(np.count_nonzero(direct), 41)

    def test_scale_invariance(self):
        air = decaying_air(2)
        scaled = AcousticImpulseResponse(-3.5 * air.taps, FS)
        self.assertAlmostEqual(compute_drr(air), compute_drr(scaled), places=10)

    def test_matches_brute_force_on_simulated_rooms(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            with self.subTest(trial=trial):
                source = rng.uniform([0.5, 0.5, 0.5], [4.5, 3.5, 2.5])
                airs = simulate_air(room(absorption=rng.uniform(0.2, 0.9), source=source,
                                         max_order=6))
                self.assertAlmostEqual(compute_drr(airs[0]), brute_force_drr(airs[0].taps),
                                       delta=1e-9)

    def test_peak_at_start(self):
        air = AcousticImpulseResponse([1.0] + [0.0] * 100 + [0.5], FS)
        self.assertAlmostEqual(compute_drr(air), 10 * math.log10(4.0))


class SrrTests(SimpleTestCase):

    def test_matches_direct_convolution(self):
        air = decaying_air(4, length=1500)
        speech = white(3000, seed=5)
        direct, reverberant = split_air(air)
        source = speech.samples[0]
        expected = 10 * math.log10(np.sum(np.convolve(source, direct) ** 2)
                                   / np.sum(np.convolve(source, reverberant) ** 2))
        self.assertAlmostEqual(compute_srr(air, speech), expected, delta=1e-9 * abs(expected) + 1e-9)

    def test_pure_tone_sees_the_air_at_one_frequency(self):
        air = decaying_air(6, length=2000)
        t = np.arange(2 * FS) / FS
        tone = MultichannelAudio.mono(np.sin(2 * np.pi * 1000.0 * t), FS)
        direct, reverberant = split_air(air)
        expected = 10 * math.log10(tone_response(direct, 1000.0) / tone_response(reverberant, 1000.0))
        self.assertAlmostEqual(compute_srr(air, tone), expected, delta=0.3)

    @tag('slow')
    def test_long_white_noise_converges_to_drr(self):
        air = decaying_air(7)
        self.assertAlmostEqual(compute_srr(air, white(60 * FS, seed=8)), compute_drr(air), delta=0.5)

    def test_silent_source(self):
        with self.assertRaises(DegenerateInputError):
            compute_srr(decaying_air(), MultichannelAudio.mono(np.zeros(100), FS))

    def test_source_must_be_mono(self):
        with self.assertRaises(ShapeError):
            compute_srr(decaying_air(), white(100, channels=2))


class SubbandTruthTests(SimpleTestCase):

    def test_white_direct_and_reverberant_parts_match_per_band(self):
        rng = np.random.default_rng(10)
        taps = rng.standard_normal(2 * 64001)
        # the direct window covers exactly the first half
        air = AcousticImpulseResponse(taps, FS, direct_peak=32000, direct_window=32000)
        truth = compute_subband_drr(air, iso_third_octave_grid(FS, min_center=1000.0))
        self.assertTrue(np.all(truth.valid))
        np.testing.assert_allclose(truth.per_band_db, 0.0, atol=1.0)

    def test_matches_frequency_domain_oracle(self):
        air = simulate_air(room(max_order=8))[0]
        grid = iso_third_octave_grid(FS, min_center=200.0)
        truth = compute_subband_drr(air, grid)
        direct, reverberant = split_air(air)
        for band, (low, high) in enumerate(zip(grid.lower, grid.upper)):
            with self.subTest(band=grid.labels[band]):
                self.assertTrue(truth.valid[band])
                expected = 10 * np.log10(filtered_energy(direct, low, high)
                                         / filtered_energy(reverberant, low, high))
                self.assertAlmostEqual(truth.per_band_db[band], expected, delta=0.1)

    def test_fullband_lies_between_band_extremes(self):
        air = decaying_air(12)
        truth = compute_subband_drr(air, iso_third_octave_grid(FS))
        fullband = compute_drr(air)
        self.assertLessEqual(np.min(truth.per_band_db[truth.valid]), fullband)
        self.assertGreaterEqual(np.max(truth.per_band_db[truth.valid]), fullband)

    def test_negligible_bands_are_invalid(self):
        taps = np.zeros(2000)
        taps[100] = 1.0
        taps[400] = 0.3
        impulses = AcousticImpulseResponse(taps, FS)
        grid = iso_third_octave_grid(FS)
        truth = compute_subband_drr(impulses, grid, negligible=1.0)
        self.assertFalse(np.any(truth.valid))
        self.assertTrue(np.all(np.isnan(truth.per_band_db)))

    def test_band_labels_follow_grid(self):
        grid = iso_third_octave_grid(FS, min_center=1000.0)
        truth = compute_subband_drr(decaying_air(11), grid)
        self.assertEqual(truth.band_centers, grid.labels)
        self.assertTrue(np.all(truth.valid))
