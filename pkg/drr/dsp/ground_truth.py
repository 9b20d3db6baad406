"""
Intrusive reference values from a known acoustic impulse response.

The AIR is split around its largest tap: everything within ``direct_window``
samples of the peak is the direct path, the rest is reverberation. DRR is
the energy ratio of the two parts; SRR is the same ratio after convolving
each part with a source signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import signal

from drr.dsp.signal_core import IsoBandGrid, MultichannelAudio, bandpass_sos
from drr.exceptions import DegenerateInputError, DomainError, ShapeError

DIRECT_WINDOW_S = 0.0025


@dataclass(frozen=True, eq=False)
class AcousticImpulseResponse:
    taps: np.ndarray
    sample_rate: int
    direct_peak: int | None = None
    direct_window: int | None = None

    def __post_init__(self):
        taps = np.array(self.taps, dtype=float).ravel()
        if taps.size == 0:
            raise ShapeError('an AIR needs at least one tap')
        if not np.all(np.isfinite(taps)):
            raise DomainError('AIR taps must be finite')
        if self.sample_rate <= 0:
            raise DomainError(f'sample_rate must be positive, got {self.sample_rate}')
        window = self.direct_window
        if window is None:
            window = max(1, int(round(DIRECT_WINDOW_S * self.sample_rate)))
        if window <= 0:
            raise DomainError(f'direct_window must be positive, got {window}')
        if self.direct_peak is not None and not 0 <= self.direct_peak < taps.size:
            raise DomainError(f'direct_peak {self.direct_peak} outside the AIR')
        taps.setflags(write=False)
        object.__setattr__(self, 'taps', taps)
        object.__setattr__(self, 'direct_window', int(window))

    @property
    def peak(self) -> int:
        if self.direct_peak is not None:
            return self.direct_peak
        if not np.any(self.taps):
            raise DegenerateInputError('cannot locate the direct path of an all-zero AIR')
        return int(np.argmax(np.abs(self.taps)))


@dataclass(frozen=True, eq=False)
class SubbandTruth:
    per_band_db: np.ndarray
    valid: np.ndarray
    band_centers: list[float]


def split_air(air: AcousticImpulseResponse) -> tuple[np.ndarray, np.ndarray]:
    peak = air.peak
    start = max(0, peak - air.direct_window)
    stop = min(air.taps.size, peak + air.direct_window + 1)
    direct = np.zeros_like(air.taps)
    direct[start:stop] = air.taps[start:stop]
    reverberant = air.taps.copy()
    reverberant[start:stop] = 0.0
    return direct, reverberant


def _ratio_db(direct_energy: float, reverberant_energy: float) -> float:
    if reverberant_energy <= 0:
        return math.inf
    return 10.0 * math.log10(direct_energy / reverberant_energy)


def compute_drr(air: AcousticImpulseResponse) -> float:
    """DRR in dB; ``inf`` for an anechoic response."""
    direct, reverberant = split_air(air)
    return _ratio_db(float(np.sum(direct ** 2)), float(np.sum(reverberant ** 2)))


def compute_srr(air: AcousticImpulseResponse, speech: MultichannelAudio) -> float:
    """SRR in dB of ``speech`` (mono) convolved with the two AIR parts."""
    if speech.channels != 1:
        raise ShapeError(f'SRR needs a mono source, got {speech.channels} channels')
    source = speech.samples[0]
    if not np.any(source):
        raise DegenerateInputError('cannot measure SRR with a silent source')
    direct, reverberant = split_air(air)
    direct_energy = float(np.sum(signal.fftconvolve(source, direct) ** 2))
    reverberant_energy = float(np.sum(signal.fftconvolve(source, reverberant) ** 2))
    return _ratio_db(direct_energy, reverberant_energy)


def compute_subband_drr(air: AcousticImpulseResponse, grid: IsoBandGrid, order: int = 8,
                        tail_s: float = 0.5, negligible: float = 1e-12) -> SubbandTruth:
    """Per-band DRR of the band-passed direct and reverberant parts.

    Both parts are zero-padded by ``tail_s`` so the filters' ringing stays
    inside the measured energy. Bands where both parts carry less than
    ``negligible`` of the AIR energy are flagged invalid (``nan``).
    """
    direct, reverberant = split_air(air)
    padding = np.zeros(int(round(tail_s * air.sample_rate)))
    direct = np.concatenate((direct, padding))
    reverberant = np.concatenate((reverberant, padding))
    total = float(np.sum(air.taps ** 2))

    values = np.full(len(grid), np.nan)
    valid = np.zeros(len(grid), dtype=bool)
    for band, (low, high) in enumerate(zip(grid.lower, grid.upper)):
        sos = bandpass_sos(float(low), float(high), order, air.sample_rate)
        direct_energy = float(np.sum(signal.sosfilt(sos, direct) ** 2))
        reverberant_energy = float(np.sum(signal.sosfilt(sos, reverberant) ** 2))
        if max(direct_energy, reverberant_energy) < negligible * total:
            continue
        values[band] = _ratio_db(direct_energy, reverberant_energy)
        valid[band] = math.isfinite(values[band])
    return SubbandTruth(per_band_db=values, valid=valid, band_centers=grid.labels)


def airs_from_audio(audio: MultichannelAudio) -> list[AcousticImpulseResponse]:
    """One AIR per channel of a multichannel AIR recording."""
    return [AcousticImpulseResponse(channel, audio.sample_rate) for channel in audio.samples]


def airs_to_audio(airs: list[AcousticImpulseResponse]) -> MultichannelAudio:
    length = max(air.taps.size for air in airs)
    samples = np.zeros((len(airs), length))
    for index, air in enumerate(airs):
        samples[index, :air.taps.size] = air.taps
    return MultichannelAudio(samples, airs[0].sample_rate)
