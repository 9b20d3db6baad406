"""
Time/frequency plumbing: audio buffers, the STFT pair, Butterworth band
filters and the one-third-octave band grid.

Conventions:
  * audio is stored channels-first, ``samples.shape == (M, N)``;
  * spectra are stored ``(frames, bins, channels)``;
  * the signal is padded with ``frame_length - hop`` leading zeros and
    trailing zeros up to a whole number of frames, so every input sample is
    covered by the full window envelope; ``stft_inverse`` truncates back to
    the original length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import signal

from drr.exceptions import ConfigurationError, DomainError, ShapeError

WINDOWS = ('sqrt_hann', 'hann', 'rectangular')

# one-third-octave preferred numbers within a decade
_NOMINAL = (1.0, 1.25, 1.6, 2.0, 2.5, 3.15, 4.0, 5.0, 6.3, 8.0)
_HALF_BAND = 2.0 ** (1.0 / 6.0)


@dataclass(frozen=True, eq=False)
class MultichannelAudio:
    """Sampled time-domain signal, ``samples`` is ``(channels, length)``."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples[np.newaxis, :]
        if samples.ndim != 2:
            raise ShapeError(f'audio must be 1-D or 2-D, got shape {samples.shape}')
        if int(self.sample_rate) <= 0:
            raise DomainError(f'sample_rate must be positive, got {self.sample_rate}')
        if not np.all(np.isfinite(samples)):
            raise DomainError('audio contains non-finite samples')
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'sample_rate', int(self.sample_rate))

    @classmethod
    def mono(cls, x, sample_rate: int) -> MultichannelAudio:
        return cls(np.asarray(x, dtype=float)[np.newaxis, :], sample_rate)

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def length(self) -> int:
        return self.samples.shape[1]

    @property
    def duration(self) -> float:
        """Length in seconds."""
        return self.length / self.sample_rate

    def channel(self, index: int) -> MultichannelAudio:
        return MultichannelAudio(self.samples[index:index + 1], self.sample_rate)

    def scaled(self, gain: float) -> MultichannelAudio:
        return MultichannelAudio(self.samples * gain, self.sample_rate)


@dataclass(frozen=True)
class StftConfig:
    frame_length: int
    hop: int
    window: str = 'sqrt_hann'
    fft_size: int | None = None

    def __post_init__(self):
        if self.frame_length <= 0 or self.hop <= 0:
            raise ConfigurationError('frame_length and hop must be positive')
        if self.hop > self.frame_length:
            raise ConfigurationError(
                f'hop ({self.hop}) must not exceed frame_length ({self.frame_length})')
        if self.window not in WINDOWS:
            raise ConfigurationError(f'unknown window {self.window!r}; expected one of {WINDOWS}')
        if self.fft_size is None:
            object.__setattr__(self, 'fft_size', 1 << (self.frame_length - 1).bit_length())
        if self.fft_size < self.frame_length:
            raise ConfigurationError('fft_size must be >= frame_length')
        product = self.analysis_window * self.synthesis_window
        if not signal.check_COLA(product, self.frame_length, self.frame_length - self.hop):
            raise ConfigurationError(
                f'{self.window} window with hop {self.hop} violates constant overlap-add')

    @classmethod
    def for_sample_rate(cls, sample_rate: int, frame_ms: float = 32.0,
                        hop_fraction: float = 0.5, window: str = 'sqrt_hann') -> StftConfig:
        frame_length = int(round(sample_rate * frame_ms / 1000.0))
        hop = max(1, int(round(frame_length * hop_fraction)))
        return cls(frame_length=frame_length, hop=hop, window=window)

    @cached_property
    def analysis_window(self) -> np.ndarray:
        if self.window == 'rectangular':
            return np.ones(self.frame_length)
        hann = signal.get_window('hann', self.frame_length, fftbins=True)
        return np.sqrt(hann) if self.window == 'sqrt_hann' else hann

    @cached_property
    def synthesis_window(self) -> np.ndarray:
        if self.window == 'sqrt_hann':
            return self.analysis_window
        return np.ones(self.frame_length)

    @property
    def lead(self) -> int:
        """Leading zeros inserted before the first frame."""
        return self.frame_length - self.hop

    @property
    def bin_count(self) -> int:
        return self.fft_size // 2 + 1

    def frame_count(self, length: int) -> int:
        return max(1, math.ceil((self.lead + length) / self.hop))

    def frequencies(self, sample_rate: int) -> np.ndarray:
        """Centre frequency of every bin in Hz."""
        return np.fft.rfftfreq(self.fft_size, 1.0 / sample_rate)

    def energy_compensation(self) -> float:
        """Mean analysis-window power per sample; divides spectral energy back to signal energy."""
        return float(np.sum(self.analysis_window ** 2) / self.hop)


@dataclass(frozen=True, eq=False)
class SpectralFrameSeries:
    """Complex STFT tensor ``bins[frame, bin, channel]``.

    ``length`` is the number of time samples the series was computed from.
    """

    bins: np.ndarray
    config: StftConfig
    sample_rate: int
    length: int

    def __post_init__(self):
        if self.bins.ndim != 3 or self.bins.shape[1] != self.config.bin_count:
            raise ShapeError(
                f'spectra must be (frames, {self.config.bin_count}, channels), got {self.bins.shape}')

    @property
    def frames(self) -> int:
        return self.bins.shape[0]

    @property
    def channels(self) -> int:
        return self.bins.shape[2]

    @property
    def frequencies(self) -> np.ndarray:
        return self.config.frequencies(self.sample_rate)

    def power(self) -> np.ndarray:
        return np.abs(self.bins) ** 2

    def with_bins(self, bins: np.ndarray) -> SpectralFrameSeries:
        return SpectralFrameSeries(bins, self.config, self.sample_rate, self.length)

    def energy(self) -> np.ndarray:
        """Window-compensated total energy per channel (Parseval)."""
        weights = np.full(self.config.bin_count, 2.0)
        weights[0] = 1.0
        if self.config.fft_size % 2 == 0:
            weights[-1] = 1.0
        per_channel = np.einsum('fkc,k->c', self.power(), weights) / self.config.fft_size
        return per_channel / self.config.energy_compensation()


@dataclass(frozen=True, eq=False)
class IsoBandGrid:
    """One-third-octave bands with exact base-2 centres ``1000 * 2**(k/3)``."""

    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    @property
    def centers(self) -> np.ndarray:
        return 1000.0 * 2.0 ** (self.indices / 3.0)

    @property
    def lower(self) -> np.ndarray:
        return self.centers / _HALF_BAND

    @property
    def upper(self) -> np.ndarray:
        return self.centers * _HALF_BAND

    @property
    def labels(self) -> list[float]:
        """Nominal preferred-frequency labels (display only)."""
        return [nominal_label(int(k)) for k in self.indices]

    def __len__(self) -> int:
        return len(self.indices)

    def band(self, label: float) -> int:
        """Position of the band whose nominal label is ``label``."""
        for position, candidate in enumerate(self.labels):
            if math.isclose(candidate, label, rel_tol=1e-6):
                return position
        raise DomainError(f'no {label} Hz band in grid')

    def subset(self, positions) -> IsoBandGrid:
        return IsoBandGrid(self.indices[np.asarray(positions, dtype=int)])


def nominal_label(index: int) -> float:
    decade, position = divmod(index, 10)
    return round(1000.0 * 10.0 ** decade * _NOMINAL[position], 6)


def stft_forward(audio: MultichannelAudio, cfg: StftConfig) -> SpectralFrameSeries:
    if audio.length == 0:
        raise ShapeError('cannot transform empty audio')
    frames = cfg.frame_count(audio.length)
    padded_length = (frames - 1) * cfg.hop + cfg.frame_length
    padded = np.zeros((audio.channels, padded_length))
    padded[:, cfg.lead:cfg.lead + audio.length] = audio.samples

    windows = np.lib.stride_tricks.sliding_window_view(padded, cfg.frame_length, axis=-1)
    windows = windows[:, ::cfg.hop][:, :frames] * cfg.analysis_window
    spectra = np.fft.rfft(windows, n=cfg.fft_size, axis=-1)
    return SpectralFrameSeries(
        bins=np.ascontiguousarray(spectra.transpose(1, 2, 0)),
        config=cfg,
        sample_rate=audio.sample_rate,
        length=audio.length,
    )


def stft_inverse(spec: SpectralFrameSeries) -> MultichannelAudio:
    cfg = spec.config
    if spec.frames != cfg.frame_count(spec.length):
        raise ShapeError(
            f'{spec.frames} frames do not match a {spec.length}-sample signal')
    frames = np.fft.irfft(spec.bins.transpose(2, 0, 1), n=cfg.fft_size, axis=-1)
    frames = frames[..., :cfg.frame_length] * cfg.synthesis_window

    padded_length = (spec.frames - 1) * cfg.hop + cfg.frame_length
    output = np.zeros((spec.channels, padded_length))
    envelope = np.zeros(padded_length)
    product = cfg.analysis_window * cfg.synthesis_window
    for index in range(spec.frames):
        start = index * cfg.hop
        output[:, start:start + cfg.frame_length] += frames[:, index]
        envelope[start:start + cfg.frame_length] += product

    nonzero = envelope > 1e-10
    output[:, nonzero] /= envelope[nonzero]
    return MultichannelAudio(output[:, cfg.lead:cfg.lead + spec.length], spec.sample_rate)


@lru_cache(maxsize=256)
def bandpass_sos(low: float, high: float, order: int, sample_rate: int) -> np.ndarray:
    """Second-order sections of a digital Butterworth band-pass of total ``order``."""
    if order < 2 or order % 2:
        raise DomainError(f'band-pass order must be even and >= 2, got {order}')
    if not 0 < low < high < sample_rate / 2:
        raise DomainError(
            f'band edges must satisfy 0 < low < high < {sample_rate / 2} Hz, got {low}-{high}')
    # butter() doubles the prototype order for band-pass designs and pre-warps the edges
    return signal.butter(order // 2, [low, high], btype='bandpass', fs=sample_rate, output='sos')


def butterworth_bandpass(audio: MultichannelAudio, low: float, high: float,
                         order: int = 8) -> MultichannelAudio:
    sos = bandpass_sos(float(low), float(high), int(order), audio.sample_rate)
    return MultichannelAudio(signal.sosfilt(sos, audio.samples, axis=-1), audio.sample_rate)


def iso_third_octave_grid(sample_rate: float, min_center: float = 100.0) -> IsoBandGrid:
    nyquist = sample_rate / 2.0
    indices = []
    index = -30
    while 1000.0 * 2.0 ** (index / 3.0) * _HALF_BAND < nyquist:
        if nominal_label(index) >= min_center - 1e-9:
            indices.append(index)
        index += 1
    return IsoBandGrid(np.array(indices, dtype=int))
