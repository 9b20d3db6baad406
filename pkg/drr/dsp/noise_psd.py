"""
Blind noise PSD tracking on STFT power spectra.

Two trackers supply the noise terms of the estimator:

  * minimum statistics: recursively smoothed periodograms, their minimum
    over a sliding window of about 1.5 s, and a bias compensation factor
    for the minimum of correlated chi-square variates;
  * MMSE / speech presence probability: a soft-decision recursive update of
    the noise periodogram weighted by the a-posteriori speech presence
    probability.

Both are streaming state machines over frames, vectorised across bins and
channels. All arithmetic is homogeneous in the input power, so scaling the
signal by ``g`` scales every estimate by ``g**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from drr.dsp.signal_core import SpectralFrameSeries, StftConfig
from drr.exceptions import ConfigurationError, ShapeError

METHODS = ('none', 'min_statistics', 'mmse_power')

# expected minimum of D chi-square variates, as tabulated for minimum statistics
_MIN_TABLE_D = np.array([1, 2, 5, 8, 10, 15, 20, 30, 40, 60, 80, 120, 140, 160])
_MIN_TABLE_M = np.array([0, 0.26, 0.48, 0.58, 0.61, 0.668, 0.705,
                         0.762, 0.8, 0.841, 0.865, 0.89, 0.9, 0.91])


@dataclass(frozen=True, eq=False)
class NoisePsdEstimate:
    psd: np.ndarray
    method: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigurationError(f'unknown noise method {self.method!r}')

    def mean(self, frames: np.ndarray | None = None) -> np.ndarray:
        """Time average over all frames, or over the boolean ``frames`` mask."""
        selected = self.psd if frames is None else self.psd[frames]
        if selected.shape[0] == 0:
            return np.zeros(self.psd.shape[1:])
        return selected.mean(axis=0)


def _periodograms(spec: SpectralFrameSeries) -> np.ndarray:
    if spec.frames < 1:
        raise ShapeError('noise tracking needs at least one frame')
    return spec.power()


def _frame_correlation(cfg: StftConfig) -> np.ndarray:
    """Correlation of white-noise periodograms 1, 2, ... hops apart."""
    window = cfg.analysis_window
    energy = np.sum(window ** 2)
    lags = range(cfg.hop, cfg.frame_length, cfg.hop)
    return np.array([np.sum(window[:-lag] * window[lag:]) ** 2 / energy ** 2 for lag in lags])


def minimum_bias(window_frames: int, smoothing: float, cfg: StftConfig) -> float:
    """Bias of the windowed minimum of smoothed periodograms.

    Equivalent degrees of freedom of the recursively smoothed periodogram
    account for the overlap between frames; the bias then follows the
    usual approximation ``1 + (D - 1) * 2 / Q~``.
    """
    rho = _frame_correlation(cfg)
    overlap_gain = 1.0 + 2.0 * float(np.sum(rho * smoothing ** np.arange(1, len(rho) + 1)))
    dof = 2.0 * (1.0 + smoothing) / ((1.0 - smoothing) * overlap_gain)
    expected_min = float(np.interp(window_frames, _MIN_TABLE_D, _MIN_TABLE_M))
    dof_tilde = (dof - 2.0 * expected_min) / (1.0 - expected_min)
    return 1.0 + (window_frames - 1) * 2.0 / dof_tilde


class MinimumStatisticsTracker:
    """Streaming minimum-statistics noise tracker.

    The sliding window is split into ``subwindows`` sub-windows; the running
    minimum of the current sub-window and the stored minima of the previous
    ones give the window minimum without keeping every frame.
    ``minimum`` is the tracked minimum of the smoothed periodogram;
    ``update`` returns it times ``bias``.
    """

    def __init__(self, shape, cfg: StftConfig, sample_rate: int,
                 window_s: float = 1.5, smoothing: float = 0.85, subwindows: int = 8):
        if not 0.0 < smoothing < 1.0:
            raise ConfigurationError(f'smoothing must lie in (0, 1), got {smoothing}')
        target = max(subwindows, int(round(window_s * sample_rate / cfg.hop)))
        self.subwindow_length = math.ceil(target / subwindows)
        self.window_frames = self.subwindow_length * subwindows
        self.smoothing = smoothing
        self.bias = minimum_bias(self.window_frames, smoothing, cfg)
        self._stored = np.full((subwindows,) + tuple(shape), np.inf)
        self._current = np.full(shape, np.inf)
        self._count = 0
        self._slot = 0
        self.smoothed = None
        self.minimum = None

    def update(self, periodogram: np.ndarray) -> np.ndarray:
        if self.smoothed is None:
            self.smoothed = periodogram.astype(float).copy()
        else:
            self.smoothed = self.smoothing * self.smoothed + (1.0 - self.smoothing) * periodogram
        self._current = np.minimum(self._current, self.smoothed)
        self.minimum = np.minimum(self._stored.min(axis=0), self._current)

        self._count += 1
        if self._count == self.subwindow_length:
            self._stored[self._slot] = self._current
            self._slot = (self._slot + 1) % len(self._stored)
            self._current = np.full_like(self._current, np.inf)
            self._count = 0
        return self.bias * self.minimum


class SppNoiseTracker:
    """Speech-presence-probability weighted MMSE noise power tracker.

    The first ``init_frames`` frames are assumed noise-only and averaged to
    seed the estimate.
    """

    def __init__(self, shape, prior: float = 0.5, smoothing: float = 0.8,
                 probability_smoothing: float = 0.9, snr_opt_db: float = 15.0,
                 init_frames: int = 10):
        if not 0.0 < prior < 1.0:
            raise ConfigurationError(f'speech presence prior must lie in (0, 1), got {prior}')
        snr_opt = 10.0 ** (snr_opt_db / 10.0)
        self.smoothing = smoothing
        self.probability_smoothing = probability_smoothing
        self.init_frames = max(1, init_frames)
        self._glr_factor = (1.0 - prior) / prior * (1.0 + snr_opt)
        self._glr_exponent = snr_opt / (1.0 + snr_opt)
        self._psd = np.zeros(shape)
        self._smoothed_probability = np.zeros(shape)
        self._frames = 0
        self.presence = np.zeros(shape)

    def update(self, periodogram: np.ndarray) -> np.ndarray:
        if self._frames < self.init_frames:
            self._frames += 1
            self._psd = self._psd + (periodogram - self._psd) / self._frames
            return self._psd.copy()

        known = self._psd > 0
        posterior = np.divide(periodogram, self._psd, out=np.zeros_like(self._psd), where=known)
        presence = 1.0 / (1.0 + self._glr_factor * np.exp(-posterior * self._glr_exponent))
        presence = np.where(known, presence, 0.0)

        # stuck protection
        self._smoothed_probability = (self.probability_smoothing * self._smoothed_probability
                                      + (1.0 - self.probability_smoothing) * presence)
        stuck = self._smoothed_probability > 0.99
        presence[stuck] = np.minimum(presence[stuck], 0.99)

        noise_periodogram = (1.0 - presence) * periodogram + presence * self._psd
        self._psd = self.smoothing * self._psd + (1.0 - self.smoothing) * noise_periodogram
        self.presence = presence
        return self._psd.copy()


def _track(tracker, periodograms: np.ndarray) -> np.ndarray:
    psd = np.empty_like(periodograms)
    for frame, periodogram in enumerate(periodograms):
        psd[frame] = tracker.update(periodogram)
    return psd


def estimate_noise_min_statistics(spec: SpectralFrameSeries, window_s: float = 1.5,
                                  smoothing: float = 0.85) -> NoisePsdEstimate:
    periodograms = _periodograms(spec)
    tracker = MinimumStatisticsTracker(periodograms.shape[1:], spec.config, spec.sample_rate,
                                       window_s=window_s, smoothing=smoothing)
    return NoisePsdEstimate(_track(tracker, periodograms), 'min_statistics')


def estimate_noise_mmse(spec: SpectralFrameSeries, prior: float = 0.5,
                        smoothing: float = 0.8) -> NoisePsdEstimate:
    periodograms = _periodograms(spec)
    tracker = SppNoiseTracker(periodograms.shape[1:], prior=prior, smoothing=smoothing)
    return NoisePsdEstimate(_track(tracker, periodograms), 'mmse_power')


def no_noise_estimate(spec: SpectralFrameSeries) -> NoisePsdEstimate:
    return NoisePsdEstimate(np.zeros(spec.bins.shape), 'none')


def estimate_noise(spec: SpectralFrameSeries, method: str) -> NoisePsdEstimate:
    if method == 'none':
        return no_noise_estimate(spec)
    if method == 'min_statistics':
        return estimate_noise_min_statistics(spec)
    if method == 'mmse_power':
        return estimate_noise_mmse(spec)
    raise ConfigurationError(f'unknown noise method {method!r}; expected one of {METHODS}')
