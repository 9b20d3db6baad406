"""
Noise generation and SNR-controlled mixing.

SNR is referenced to channel 1: the speech power is measured over active
frames only (frame energy above ``gate`` times the loudest frame), the noise
power over the segment that is actually added, and one gain is applied to
every noise channel.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy import signal

from drr.dsp.isim import RoomSpec, render_reverberant
from drr.dsp.signal_core import MultichannelAudio
from drr.exceptions import ConfigurationError, DegenerateInputError, DomainError, ShapeError

logger = logging.getLogger(__name__)

ACTIVITY_GATE = 1e-4
FRAME_S = 0.02

NOISE_KINDS = ('white', 'pink', 'babble_surrogate')
# names used by the corpus for the three noise conditions
NOISE_ALIASES = {'ambient': 'white', 'fan': 'pink', 'babble': 'babble_surrogate'}

# -3 dB/octave pinking filter
_PINK_B = np.array([0.049922035, -0.095993537, 0.050612699, -0.004408786])
_PINK_A = np.array([1.0, -2.494956002, 2.017265875, -0.522189400])


def noise_kind(name: str) -> str:
    kind = NOISE_ALIASES.get(name, name)
    if kind not in NOISE_KINDS:
        raise ConfigurationError(
            f'unknown noise kind {name!r}; expected one of {NOISE_KINDS + tuple(NOISE_ALIASES)}')
    return kind


def active_power(x: np.ndarray, sample_rate: int, gate: float = ACTIVITY_GATE) -> float:
    """Mean power of the frames whose energy exceeds ``gate`` times the peak frame."""
    frame = max(1, int(round(FRAME_S * sample_rate)))
    count = math.ceil(len(x) / frame)
    padded = np.zeros(count * frame)
    padded[:len(x)] = x
    frames = padded.reshape(count, frame)
    energy = np.sum(frames ** 2, axis=1)
    if energy.max() <= 0:
        raise DegenerateInputError('cannot measure the level of a silent signal')
    active = frames[energy > gate * energy.max()]
    return float(np.mean(active ** 2))


def _noise_power(noise: np.ndarray) -> float:
    power = float(np.mean(noise ** 2))
    if power <= 0:
        raise DegenerateInputError('cannot mix a silent noise signal')
    return power


def _check_pair(speech: MultichannelAudio, noise: MultichannelAudio):
    if noise.channels != speech.channels:
        raise ShapeError(f'speech has {speech.channels} channels, noise {noise.channels}')
    if noise.sample_rate != speech.sample_rate:
        raise ConfigurationError(
            f'speech sampled at {speech.sample_rate} Hz, noise at {noise.sample_rate} Hz')
    if noise.length < speech.length:
        raise ShapeError(f'noise ({noise.length} samples) shorter than speech ({speech.length})')


def noise_gain(speech: MultichannelAudio, noise: MultichannelAudio, snr_db: float,
               gate: float = ACTIVITY_GATE) -> float:
    """Gain that puts ``noise`` at ``snr_db`` below ``speech``; 0 for ``inf``."""
    _check_pair(speech, noise)
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    if math.isnan(snr_db) or math.isinf(snr_db):
        raise DomainError(f'snr_db must be finite or +inf, got {snr_db}')
    speech_power = active_power(speech.samples[0], speech.sample_rate, gate)
    noise_power = _noise_power(noise.samples[0, :speech.length])
    return math.sqrt(speech_power / (noise_power * 10.0 ** (snr_db / 10.0)))


def mix_at_snr(speech: MultichannelAudio, noise: MultichannelAudio, snr_db: float,
               gate: float = ACTIVITY_GATE) -> MultichannelAudio:
    gain = noise_gain(speech, noise, snr_db, gate)
    logger.debug('mixing at %.1f dB SNR, noise gain %.4g', snr_db, gain)
    if gain == 0.0:
        return speech
    return MultichannelAudio(speech.samples + gain * noise.samples[:, :speech.length],
                             speech.sample_rate)


def measure_snr(speech: MultichannelAudio, noise: MultichannelAudio,
                gate: float = ACTIVITY_GATE) -> float:
    """SNR in dB of the components of a mixture, measured as ``mix_at_snr`` does."""
    speech_power = active_power(speech.samples[0], speech.sample_rate, gate)
    noise_power = _noise_power(noise.samples[0, :speech.length])
    return 10.0 * math.log10(speech_power / noise_power)


def _unit_rms(x: np.ndarray) -> np.ndarray:
    rms = float(np.sqrt(np.mean(x ** 2)))
    return x / rms if rms > 0 else x


def speech_shaped_noise(length: int, sample_rate: int, rng: np.random.Generator,
                        modulated: bool = True) -> np.ndarray:
    """Gaussian noise with a speech-like spectral tilt.

    With ``modulated`` the noise is gated into word-like bursts of
    0.15-0.5 s separated by 0.05-0.3 s pauses, which gives a syllabic
    envelope around 4 Hz and real pauses for the activity gates.
    """
    if length <= 0:
        raise DomainError(f'length must be positive, got {length}')
    white = rng.standard_normal(length)
    high = min(4000.0, 0.45 * sample_rate)
    shaped = signal.sosfilt(signal.butter(2, [100.0, high], 'bandpass', fs=sample_rate,
                                          output='sos'), white)
    shaped = signal.sosfilt(signal.butter(1, 500.0, 'lowpass', fs=sample_rate,
                                          output='sos'), shaped) + 0.1 * shaped
    if modulated:
        envelope = np.zeros(length)
        position = 0
        while position < length:
            burst = int(rng.uniform(0.15, 0.5) * sample_rate)
            stop = min(length, position + burst)
            envelope[position:stop] = signal.windows.tukey(burst, 0.3)[:stop - position]
            position = stop + int(rng.uniform(0.05, 0.3) * sample_rate)
        shaped = shaped * envelope
    return _unit_rms(shaped)


def _babble_positions(room: RoomSpec, talkers: int, rng: np.random.Generator) -> np.ndarray:
    margin = np.minimum(0.5, room.dimensions / 4)
    positions = []
    for _ in range(1000 * talkers):
        if len(positions) == talkers:
            break
        point = rng.uniform(margin, room.dimensions - margin)
        if np.min(np.linalg.norm(room.microphones - point, axis=1)) > 0.5:
            positions.append(point)
    if len(positions) < talkers:
        raise DomainError('room too small to place babble talkers away from the microphones')
    return np.array(positions)


def generate_noise(kind: str, length: int, sample_rate: int, channels: int = 2,
                   room: RoomSpec | None = None, seed: int | list[int] = 0,
                   talkers: int = 8) -> MultichannelAudio:
    """Unit-RMS noise for the ``white``, ``pink`` and ``babble_surrogate`` kinds.

    Babble is the sum of ``talkers`` speech-shaped sources rendered through
    ``room``, so it has as many channels as the room has microphones.
    """
    kind = noise_kind(kind)
    if length <= 0:
        raise DomainError(f'length must be positive, got {length}')
    rng = np.random.default_rng(seed)

    if kind == 'white':
        samples = rng.standard_normal((channels, length))
    elif kind == 'pink':
        # extra lead-in so the filter transient is dropped
        lead = sample_rate
        white = rng.standard_normal((channels, length + lead))
        samples = signal.lfilter(_PINK_B, _PINK_A, white, axis=1)[:, lead:]
    else:
        if room is None:
            raise ConfigurationError('babble_surrogate noise needs a room description')
        if room.sample_rate != sample_rate:
            raise ConfigurationError(
                f'room sampled at {room.sample_rate} Hz, noise requested at {sample_rate} Hz')
        if talkers < 1:
            raise DomainError(f'talkers must be positive, got {talkers}')
        samples = np.zeros((len(room.microphones), length))
        for position in _babble_positions(room, talkers, rng):
            talker = MultichannelAudio.mono(speech_shaped_noise(length, sample_rate, rng),
                                            sample_rate)
            rendered = render_reverberant(room.with_source(position), talker)
            samples += rendered.samples[:, :length]
    return MultichannelAudio(_unit_rms(samples), sample_rate)
