"""
DRR estimation with a null-steered beamformer.

Per STFT bin the direct-to-reverberant power ratio follows from the total
microphone power, the beamformer output power (direct path cancelled) and
the beamformer's diffuse-field gain:

    eta(w) = (E|Y|^2 - E|V|^2) / ((1/G^2) (E|Z_y|^2 - E|Z_v|^2)) - 1

The fullband value is the mean of ``eta`` over usable bins in the
integration range, in the linear domain, reported in dB and clamped to
``[floor_db, ceil_db]``; the floor doubles as the "unable to estimate"
sentinel.

Variants:
  C  no noise reduction
  D  minimum-statistics noise PSD
  E  MMSE noise PSD
  F  E, with per-bin ratios mapped onto one-third-octave bands by a weight matrix
  G  E, run once per band on Butterworth band-passed input
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from drr.conf import DenbeConfig
from drr.dsp.alignment import align_channels, default_max_lag
from drr.dsp.beamformer import BeamformerDesign, apply_beamformer, design_null_beamformer
from drr.dsp.noise_psd import estimate_noise
from drr.dsp.signal_core import (
    IsoBandGrid,
    MultichannelAudio,
    StftConfig,
    butterworth_bandpass,
    iso_third_octave_grid,
    stft_forward,
)
from drr.exceptions import ConfigurationError, ShapeError

logger = logging.getLogger(__name__)

NOISE_METHODS = {
    'C': 'none',
    'D': 'min_statistics',
    'E': 'mmse_power',
    'F': 'mmse_power',
    'G': 'mmse_power',
}
VARIANTS = tuple(NOISE_METHODS)
SUBBAND_VARIANTS = ('F', 'G')


@dataclass(frozen=True, eq=False)
class BinDrrSeries:
    eta: np.ndarray
    usable: np.ndarray
    frequencies: np.ndarray
    integration_range: tuple[float, float]

    def __post_init__(self):
        if not self.eta.shape == self.usable.shape == self.frequencies.shape:
            raise ShapeError('eta, usable and frequencies must have equal length')
        low, high = self.integration_range
        if not low < high:
            raise ConfigurationError(f'integration range {low}-{high} Hz is empty')

    def in_range(self) -> np.ndarray:
        low, high = self.integration_range
        return self.usable & (self.frequencies >= low) & (self.frequencies <= high)


@dataclass(frozen=True, eq=False)
class DrrResult:
    variant: str
    fullband_db: float
    per_band_db: np.ndarray | None = None
    band_valid: np.ndarray | None = None
    band_centers: list[float] | None = None
    usable_bins: int = 0

    @property
    def has_bands(self) -> bool:
        return self.per_band_db is not None


@dataclass(frozen=True, eq=False)
class SubbandWeightMatrix:
    weights: np.ndarray
    empty: np.ndarray
    grid: IsoBandGrid = field(default_factory=IsoBandGrid)


def to_db(ratio: float, floor_db: float, ceil_db: float) -> float:
    """Linear power ratio to clamped dB; non-positive ratios give the floor."""
    if ratio == math.inf:
        return ceil_db
    if math.isnan(ratio) or ratio <= 0:
        return floor_db
    return float(min(max(10.0 * math.log10(ratio), floor_db), ceil_db))


def estimate_bin_drr(y_psd, v_psd, zy_psd, zv_psd, gain_sq, usable, frequencies=None,
                     integration_range: tuple[float, float] | None = None) -> BinDrrSeries:
    y_psd, v_psd, zy_psd, zv_psd, gain_sq = (
        np.asarray(a, dtype=float) for a in (y_psd, v_psd, zy_psd, zv_psd, gain_sq))
    usable = np.asarray(usable, dtype=bool)
    if not y_psd.shape == v_psd.shape == zy_psd.shape == zv_psd.shape == gain_sq.shape == usable.shape:
        raise ShapeError('all per-bin vectors must have the same length')
    if frequencies is None:
        frequencies = np.arange(len(y_psd), dtype=float)
    if integration_range is None:
        integration_range = (float(frequencies[0]), float(frequencies[-1]) + 1.0)

    numerator = y_psd - v_psd
    with np.errstate(divide='ignore', invalid='ignore'):
        denominator = np.where(gain_sq > 0, (1.0 / gain_sq) * (zy_psd - zv_psd), 0.0)
        eta = np.where(denominator > 0, numerator / denominator - 1.0, np.nan)
    # non-positive numerator: noise overestimated or no source energy;
    # non-positive denominator: no reverberant energy left after noise removal
    usable = usable & (numerator > 0) & (denominator > 0) & np.isfinite(eta)
    return BinDrrSeries(eta=eta, usable=usable, frequencies=np.asarray(frequencies, dtype=float),
                        integration_range=(float(integration_range[0]), float(integration_range[1])))


def integrate_fullband(bins: BinDrrSeries, floor_db: float = -20.0, ceil_db: float = 30.0) -> float:
    selected = bins.in_range()
    if not np.any(selected):
        logger.warning('no usable bins in %.0f-%.0f Hz; reporting the floor',
                       *bins.integration_range)
        return floor_db
    return to_db(float(np.mean(bins.eta[selected])), floor_db, ceil_db)


def build_subband_weights(grid: IsoBandGrid, cfg: StftConfig, sample_rate: int) -> SubbandWeightMatrix:
    frequencies = cfg.frequencies(sample_rate)
    weights = np.zeros((len(grid), len(frequencies)))
    for band, (low, high) in enumerate(zip(grid.lower, grid.upper)):
        weights[band, (frequencies >= low) & (frequencies < high)] = 1.0
    counts = weights.sum(axis=1)
    empty = counts == 0
    weights[~empty] /= counts[~empty, np.newaxis]
    return SubbandWeightMatrix(weights=weights, empty=empty, grid=grid)


def estimate_subband_F(bins: BinDrrSeries, weights: SubbandWeightMatrix,
                       floor_db: float = -20.0, ceil_db: float = 30.0) -> DrrResult:
    if weights.weights.shape[1] != len(bins.eta):
        raise ShapeError(
            f'weight matrix has {weights.weights.shape[1]} columns for {len(bins.eta)} bins')
    per_band = np.full(len(weights.weights), floor_db)
    valid = np.zeros(len(weights.weights), dtype=bool)
    for band, row in enumerate(weights.weights):
        mask = (row > 0) & bins.usable
        if not np.any(mask):
            continue
        ratio = float(np.sum(row[mask] * bins.eta[mask]) / np.sum(row[mask]))
        per_band[band] = to_db(ratio, floor_db, ceil_db)
        valid[band] = True
    return DrrResult(
        variant='F',
        fullband_db=integrate_fullband(bins, floor_db, ceil_db),
        per_band_db=per_band,
        band_valid=valid,
        band_centers=weights.grid.labels,
        usable_bins=int(np.count_nonzero(bins.in_range())),
    )


def activity_gate(power: np.ndarray, threshold: float) -> np.ndarray:
    """Frames whose energy exceeds ``threshold`` times the loudest frame."""
    energy = power.sum(axis=1)
    peak = energy.max() if energy.size else 0.0
    if peak <= 0:
        return np.zeros(len(energy), dtype=bool)
    return energy > threshold * peak


class DenbeEstimator:
    """The complete DENBE stack for one sample rate and configuration.

    STFT configuration, beamformer design, band grid and weight matrix are
    built once and shared by every call; estimating is otherwise stateless,
    so one instance may serve several threads.
    """

    def __init__(self, sample_rate: int, config: DenbeConfig | None = None):
        self.sample_rate = int(sample_rate)
        self.config = config or DenbeConfig()

    @cached_property
    def stft_config(self) -> StftConfig:
        return StftConfig.for_sample_rate(self.sample_rate, self.config.frame_ms,
                                          self.config.hop_fraction, self.config.window)

    @cached_property
    def design(self) -> BeamformerDesign:
        return design_null_beamformer(
            self.config.mic_spacing_m, self.sample_rate, self.stft_config,
            sound_speed=self.config.sound_speed,
            floor_frequency=self.config.floor_frequency_hz,
            min_gain_sq=self.config.min_gain_sq,
        )

    @cached_property
    def grid(self) -> IsoBandGrid:
        return iso_third_octave_grid(self.sample_rate, self.config.min_center_hz)

    @cached_property
    def subband_weights(self) -> SubbandWeightMatrix:
        return build_subband_weights(self.grid, self.stft_config, self.sample_rate)

    @property
    def integration_range(self) -> tuple[float, float]:
        high = min(self.config.range_high_hz, self.sample_rate / 2.0)
        return (self.config.range_low_hz, high)

    def align(self, audio: MultichannelAudio) -> MultichannelAudio:
        max_lag = default_max_lag(audio.sample_rate, self.config.max_lag_s)
        return align_channels(audio, max_lag).aligned

    def _expected_powers(self, aligned: MultichannelAudio, noise_method: str,
                         active: np.ndarray | None = None):
        """Frame gate and the four time-averaged PSDs for an aligned two-channel signal."""
        if aligned.channels != 2:
            raise ShapeError(f'DENBE needs a two-channel input, got {aligned.channels}')
        if aligned.sample_rate != self.sample_rate:
            raise ConfigurationError(
                f'estimator built for {self.sample_rate} Hz, audio is {aligned.sample_rate} Hz')
        ref = self.config.reference_channel
        spec = stft_forward(aligned, self.stft_config)
        z = apply_beamformer(spec, self.design).z
        mic_noise = estimate_noise(spec, noise_method)
        out_noise = estimate_noise(z, noise_method)

        mic_power = spec.power()
        if active is None:
            active = activity_gate(mic_power[:, :, ref], self.config.activity_gate)
        elif len(active) != spec.frames:
            raise ShapeError(f'frame gate has {len(active)} entries for {spec.frames} frames')
        if not np.any(active):
            zeros = np.zeros(self.stft_config.bin_count)
            return active, (zeros, zeros, zeros, zeros)
        return active, (
            mic_power[active, :, ref].mean(axis=0),
            mic_noise.psd[active, :, ref].mean(axis=0),
            z.power()[active, :, 0].mean(axis=0),
            out_noise.psd[active, :, 0].mean(axis=0),
        )

    def _bins(self, powers, integration_range: tuple[float, float] | None) -> BinDrrSeries:
        return estimate_bin_drr(*powers, self.design.diffuse_gain_sq, self.design.usable.copy(),
                                frequencies=self.design.frequencies,
                                integration_range=integration_range or self.integration_range)

    def analyse(self, aligned: MultichannelAudio, noise_method: str,
                integration_range: tuple[float, float] | None = None,
                active: np.ndarray | None = None) -> BinDrrSeries:
        """Per-bin ratios for an aligned two-channel signal.

        ``active`` replaces the frame gate computed from ``aligned`` itself;
        variant G passes the broadband gate to every band.
        """
        active, powers = self._expected_powers(aligned, noise_method, active)
        bins = self._bins(powers, integration_range)
        logger.debug('%d active frames, %d usable bins', int(np.count_nonzero(active)),
                     int(np.count_nonzero(bins.usable)))
        return bins

    def estimate_fullband(self, aligned: MultichannelAudio, variant: str = 'E') -> DrrResult:
        bins = self.analyse(aligned, NOISE_METHODS[variant])
        return DrrResult(
            variant=variant,
            fullband_db=integrate_fullband(bins, self.config.floor_db, self.config.ceil_db),
            usable_bins=int(np.count_nonzero(bins.in_range())),
        )

    def estimate_subband_F(self, aligned: MultichannelAudio) -> DrrResult:
        bins = self.analyse(aligned, NOISE_METHODS['F'])
        return estimate_subband_F(bins, self.subband_weights,
                                  self.config.floor_db, self.config.ceil_db)

    def estimate_subband_G(self, aligned: MultichannelAudio, grid: IsoBandGrid | None = None) -> DrrResult:
        """Per band: band-pass both channels and rerun the whole stack.

        Each band is integrated over its own [lower, upper) bins with the
        fullband usable rule, on the frames the broadband gate keeps. A band
        whose broadband microphone power lies ``silent_band_db`` below the
        in-range total reports the floor.
        """
        grid = self.grid if grid is None else grid
        floor_db, ceil_db = self.config.floor_db, self.config.ceil_db
        method = NOISE_METHODS['G']
        active, powers = self._expected_powers(aligned, method)
        broadband = self._bins(powers, None)

        frequencies = self.design.frequencies
        low_hz, high_hz = self.integration_range
        in_range = (frequencies >= low_hz) & (frequencies <= high_hz)
        silence = powers[0][in_range].sum() * 10.0 ** (self.config.silent_band_db / 10.0)

        per_band = np.full(len(grid), floor_db)
        valid = np.zeros(len(grid), dtype=bool)
        for band, (low, high) in enumerate(zip(grid.lower, grid.upper)):
            if high <= self.config.floor_frequency_hz:
                logger.debug('%.0f Hz band lies below the beamformer floor', grid.centers[band])
                continue
            in_band = (frequencies >= low) & (frequencies < high)
            if not np.any(in_band) or powers[0][in_band].sum() <= silence:
                logger.debug('%.0f Hz band is silent', grid.centers[band])
                continue
            filtered = butterworth_bandpass(aligned, low, high, self.config.filter_order)
            bins = self.analyse(filtered, method, integration_range=(low, high), active=active)
            if not np.any(bins.in_range()):
                continue
            per_band[band] = integrate_fullband(bins, floor_db, ceil_db)
            valid[band] = True

        return DrrResult(
            variant='G',
            fullband_db=integrate_fullband(broadband, floor_db, ceil_db),
            per_band_db=per_band,
            band_valid=valid,
            band_centers=grid.labels,
            usable_bins=int(np.count_nonzero(broadband.in_range())),
        )

    def estimate(self, audio: MultichannelAudio, variant: str = 'E', aligned: bool = False) -> DrrResult:
        """Align (unless ``aligned``) and run one variant."""
        if variant not in NOISE_METHODS:
            raise ConfigurationError(f'unknown variant {variant!r}; expected one of {VARIANTS}')
        signal = audio if aligned else self.align(audio)
        if variant == 'F':
            return self.estimate_subband_F(signal)
        if variant == 'G':
            return self.estimate_subband_G(signal)
        return self.estimate_fullband(signal, variant)


def estimate_subband_G(audio: MultichannelAudio, grid: IsoBandGrid,
                       pipeline: DenbeEstimator | None = None) -> DrrResult:
    """Variant G on already aligned two-channel input."""
    pipeline = pipeline or DenbeEstimator(audio.sample_rate)
    return pipeline.estimate_subband_G(audio, grid)


def estimate_drr(audio: MultichannelAudio, variant: str = 'E',
                 config: DenbeConfig | None = None) -> DrrResult:
    return DenbeEstimator(audio.sample_rate, config).estimate(audio, variant)
