"""
Estimator and harness parameters.

``DenbeConfig`` is a plain frozen dataclass so the numerical code can take it
without touching Django; ``from_settings`` reads the ``DENBE`` settings
dictionary and command-line flags are layered on top with ``override``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from drr.exceptions import ConfigurationError


@dataclass(frozen=True)
class DenbeConfig:
    frame_ms: float = 32.0
    hop_fraction: float = 0.5
    window: str = 'sqrt_hann'
    floor_db: float = -20.0
    ceil_db: float = 30.0
    range_low_hz: float = 200.0
    range_high_hz: float = 6300.0
    floor_frequency_hz: float = 200.0
    min_gain_sq: float = 1e-3
    mic_spacing_m: float = 0.05
    sound_speed: float = 343.0
    reference_channel: int = 0
    activity_gate: float = 1e-6
    silent_band_db: float = -70.0
    max_lag_s: float = 0.01
    min_center_hz: float = 100.0
    filter_order: int = 8
    workers: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.floor_db >= self.ceil_db:
            raise ConfigurationError(
                f'floor_db ({self.floor_db}) must be below ceil_db ({self.ceil_db})')
        if not 0 <= self.range_low_hz < self.range_high_hz:
            raise ConfigurationError(
                f'integration range {self.range_low_hz}-{self.range_high_hz} Hz is empty')
        if self.reference_channel not in (0, 1):
            raise ConfigurationError('reference_channel must be 0 or 1')
        if self.workers < 1:
            raise ConfigurationError('workers must be at least 1')
        if not 0 < self.hop_fraction <= 1:
            raise ConfigurationError('hop_fraction must lie in (0, 1]')
        if self.silent_band_db >= 0:
            raise ConfigurationError('silent_band_db must be negative')

    @classmethod
    def from_settings(cls) -> DenbeConfig:
        from django.conf import settings

        values = getattr(settings, 'DENBE', {})
        names = {field.name for field in dataclasses.fields(cls)}
        mapped = {key.lower(): value for key, value in values.items()}
        return cls(**{name: value for name, value in mapped.items() if name in names})

    def override(self, **changes) -> DenbeConfig:
        """Copy with the non-None ``changes`` applied."""
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})
