"""
Inter-channel time alignment for the two-microphone array.

The estimator needs the talker broadside to the array. Instead of a known
direction of arrival the integer delay between the channels is estimated
with GCC-PHAT and removed, which puts the direct path in phase on both
microphones.

A positive lag means channel 2 is delayed with respect to channel 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from drr.dsp.signal_core import MultichannelAudio
from drr.exceptions import DegenerateInputError, DomainError, ShapeError

logger = logging.getLogger(__name__)

LOW_CONFIDENCE = 0.1


class TdoaEstimate(NamedTuple):
    lag: int
    confidence: float


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    lag: int
    confidence: float
    aligned: MultichannelAudio


def default_max_lag(sample_rate: int, max_lag_s: float = 0.01) -> int:
    return int(math.ceil(sample_rate * max_lag_s))


def _require_pair(audio: MultichannelAudio):
    if audio.channels != 2:
        raise ShapeError(f'alignment needs exactly 2 channels, got {audio.channels}')


def estimate_tdoa_gcc_phat(audio: MultichannelAudio, max_lag: int) -> TdoaEstimate:
    _require_pair(audio)
    if not 0 <= max_lag < audio.length / 2:
        raise DomainError(f'max_lag must lie in [0, {audio.length / 2}), got {max_lag}')
    first, second = audio.samples
    if not np.any(first) or not np.any(second):
        raise DegenerateInputError('cannot estimate a delay against a silent channel')

    # zero-padded to avoid circular wrap-around of the correlation
    n = 2 * audio.length
    cross = np.fft.rfft(second, n=n) * np.conj(np.fft.rfft(first, n=n))
    magnitude = np.abs(cross)
    floor = magnitude.max() * 1e-12
    whitened = np.where(magnitude > floor, cross / np.maximum(magnitude, floor), 0.0)
    cc = np.fft.irfft(whitened, n=n)

    # lags -max_lag..+max_lag
    window = np.concatenate((cc[n - max_lag:], cc[:max_lag + 1])) if max_lag else cc[:1]
    peak = int(np.argmax(window))
    mass = float(np.sum(np.abs(window)))
    confidence = float(window[peak] / mass) if mass > 0 else 0.0
    return TdoaEstimate(lag=peak - max_lag, confidence=min(max(confidence, 0.0), 1.0))


def align(audio: MultichannelAudio, lag: int) -> MultichannelAudio:
    """Shift channel 2 by ``-lag`` and keep only the overlapping region."""
    _require_pair(audio)
    lag = int(lag)
    if abs(lag) >= audio.length:
        raise DomainError(f'|lag| must be smaller than the signal length {audio.length}')
    first, second = audio.samples
    end = audio.length
    if lag >= 0:
        pair = np.stack((first[:end - lag], second[lag:]))
    else:
        pair = np.stack((first[-lag:], second[:end + lag]))
    return MultichannelAudio(pair, audio.sample_rate)


def align_channels(audio: MultichannelAudio, max_lag: int | None = None) -> AlignmentResult:
    """Estimate the inter-channel delay and remove it."""
    if max_lag is None:
        max_lag = default_max_lag(audio.sample_rate)
    max_lag = min(max_lag, max(0, (audio.length - 1) // 2))
    estimate = estimate_tdoa_gcc_phat(audio, max_lag)
    if estimate.confidence < LOW_CONFIDENCE:
        logger.warning('low alignment confidence %.3f at lag %d', estimate.confidence, estimate.lag)
    else:
        logger.debug('alignment lag %d, confidence %.3f', estimate.lag, estimate.confidence)
    return AlignmentResult(estimate.lag, estimate.confidence, align(audio, estimate.lag))
