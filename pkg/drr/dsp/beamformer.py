"""
Two-channel null-steered beamformer.

After alignment the talker is broadside, so the delay-and-subtract weights
``[1/2, -1/2]`` put a null on the direct path at every frequency. What is left
is mostly reverberation, passed with the isotropic diffuse-field power gain
``G^2 = w^H Gamma w`` where ``Gamma`` is the sinc coherence of a diffuse field
between the microphones. For the default weights this is
``(1 - sinc(2 pi f d / c)) / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from drr.dsp.signal_core import SpectralFrameSeries, StftConfig
from drr.exceptions import DomainError, ShapeError

NULL_STEERED_WEIGHTS = (0.5, -0.5)


@dataclass(frozen=True, eq=False)
class BeamformerDesign:
    mic_spacing: float
    sound_speed: float
    frequencies: np.ndarray
    weights: np.ndarray
    diffuse_gain_sq: np.ndarray
    usable: np.ndarray
    floor_frequency: float
    min_gain_sq: float

    @property
    def bin_count(self) -> int:
        return len(self.frequencies)

    def null_response(self) -> np.ndarray:
        """Magnitude response toward the steered null (broadside) per bin."""
        return np.abs(self.weights.sum(axis=1))


@dataclass(frozen=True, eq=False)
class BeamformerOutput:
    z: SpectralFrameSeries
    design: BeamformerDesign


def diffuse_coherence(frequencies, mic_spacing: float, sound_speed: float = 343.0) -> np.ndarray:
    """Spatial coherence of an isotropic diffuse field, ``sin(kd)/(kd)``."""
    # np.sinc(x) is sin(pi x)/(pi x)
    return np.sinc(2.0 * np.asarray(frequencies, dtype=float) * mic_spacing / sound_speed)


def design_null_beamformer(mic_spacing: float, sample_rate: int, cfg: StftConfig,
                           sound_speed: float = 343.0, floor_frequency: float = 200.0,
                           min_gain_sq: float = 1e-3) -> BeamformerDesign:
    if mic_spacing <= 0:
        raise DomainError(f'mic_spacing must be positive, got {mic_spacing}')
    if sound_speed <= 0:
        raise DomainError(f'sound_speed must be positive, got {sound_speed}')
    frequencies = cfg.frequencies(sample_rate)
    weights = np.tile(np.array(NULL_STEERED_WEIGHTS, dtype=complex), (len(frequencies), 1))

    coherence = diffuse_coherence(frequencies, mic_spacing, sound_speed)
    cross = np.real(np.conj(weights[:, 0]) * weights[:, 1] * coherence)
    gain_sq = np.sum(np.abs(weights) ** 2, axis=1) + 2.0 * cross
    gain_sq = np.maximum(gain_sq, 0.0)

    usable = (frequencies >= floor_frequency) & (gain_sq >= min_gain_sq)
    for array in (frequencies, weights, gain_sq, usable):
        array.setflags(write=False)
    return BeamformerDesign(
        mic_spacing=float(mic_spacing),
        sound_speed=float(sound_speed),
        frequencies=frequencies,
        weights=weights,
        diffuse_gain_sq=gain_sq,
        usable=usable,
        floor_frequency=float(floor_frequency),
        min_gain_sq=float(min_gain_sq),
    )


def apply_beamformer(spec: SpectralFrameSeries, design: BeamformerDesign) -> BeamformerOutput:
    if spec.channels != 2:
        raise ShapeError(f'beamformer needs exactly 2 channels, got {spec.channels}')
    if spec.bins.shape[1] != design.bin_count:
        raise ShapeError(
            f'spectra have {spec.bins.shape[1]} bins, design has {design.bin_count}')
    z = np.einsum('fkc,kc->fk', spec.bins, design.weights)[..., np.newaxis]
    return BeamformerOutput(spec.with_bins(z), design)


def diffuse_gain(design: BeamformerDesign, bin: int) -> float:
    """``G^2`` for one bin, or ``nan`` when the bin lies below the usable floor."""
    if not 0 <= bin < design.bin_count:
        raise DomainError(f'bin {bin} outside 0..{design.bin_count - 1}')
    if not design.usable[bin]:
        return math.nan
    return float(design.diffuse_gain_sq[bin])
