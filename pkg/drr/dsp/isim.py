"""
Image-source simulation of a shoebox room.

Images of the source are enumerated over the lattice
``x = (1 - 2q) * x_s + 2 n L`` per axis (``q`` in {0, 1}, ``n`` in
``-N..N``). An image reaches the wall at 0 ``|n - q|`` times and the wall at
``L`` ``|n|`` times; its tap is the product of the wall reflection
coefficients ``sqrt(1 - alpha)`` over those reflections, divided by the
distance, placed at the nearest sample of ``distance / c``.
"""

from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import signal

from drr.dsp.ground_truth import AcousticImpulseResponse, airs_to_audio
from drr.dsp.signal_core import MultichannelAudio
from drr.exceptions import ConfigurationError, DenbeError, DomainError, ShapeError

logger = logging.getLogger(__name__)

MAX_ORDER_CAP = 40
COINCIDENCE_M = 1e-6


@dataclass(frozen=True, eq=False)
class RoomSpec:
    """Shoebox room with one source and ``M`` microphones.

    ``absorption`` holds one coefficient per surface in the order
    x=0, x=L, y=0, y=W, z=0, z=H; a scalar applies to every surface.
    ``max_order=None`` picks the order from the Sabine reverberation time.
    """

    dimensions: np.ndarray
    absorption: np.ndarray
    source: np.ndarray
    microphones: np.ndarray
    sample_rate: int = 16000
    sound_speed: float = 343.0
    max_order: int | None = None

    def __post_init__(self):
        dimensions = np.asarray(self.dimensions, dtype=float).ravel()
        if dimensions.shape != (3,) or np.any(dimensions <= 0):
            raise DomainError(f'room dimensions must be three positive lengths, got {dimensions}')
        absorption = np.asarray(self.absorption, dtype=float).ravel()
        if absorption.size == 1:
            absorption = np.repeat(absorption, 6)
        if absorption.shape != (6,):
            raise ShapeError(f'absorption needs 1 or 6 coefficients, got {absorption.size}')
        if np.any(absorption <= 0) or np.any(absorption > 1):
            raise DomainError('absorption coefficients must lie in (0, 1]')
        source = np.asarray(self.source, dtype=float).ravel()
        microphones = np.atleast_2d(np.asarray(self.microphones, dtype=float))
        if source.shape != (3,) or microphones.ndim != 2 or microphones.shape[1] != 3:
            raise ShapeError('source and microphones must be 3-D coordinates')
        for name, points in (('source', source[np.newaxis]), ('microphone', microphones)):
            if np.any(points <= 0) or np.any(points >= dimensions):
                raise DomainError(f'{name} must lie strictly inside the room')
        if self.sample_rate <= 0 or self.sound_speed <= 0:
            raise DomainError('sample_rate and sound_speed must be positive')
        if self.max_order is not None and self.max_order < 0:
            raise DomainError(f'max_order must be >= 0, got {self.max_order}')
        for array in (dimensions, absorption, source, microphones):
            array.setflags(write=False)
        object.__setattr__(self, 'dimensions', dimensions)
        object.__setattr__(self, 'absorption', absorption)
        object.__setattr__(self, 'source', source)
        object.__setattr__(self, 'microphones', microphones)
        object.__setattr__(self, 'sample_rate', int(self.sample_rate))

    @property
    def volume(self) -> float:
        return float(np.prod(self.dimensions))

    @property
    def surface_areas(self) -> np.ndarray:
        length, width, height = self.dimensions
        return np.array([width * height] * 2 + [length * height] * 2 + [length * width] * 2)

    @property
    def reflection(self) -> np.ndarray:
        return np.sqrt(1.0 - self.absorption)

    @property
    def resolved_order(self) -> int:
        if self.max_order is not None:
            return int(self.max_order)
        t60 = sabine_t60(self)
        order = math.ceil(self.sound_speed * t60 / float(self.dimensions.min()))
        return int(min(max(order, 1), MAX_ORDER_CAP))

    def with_source(self, source) -> RoomSpec:
        return RoomSpec(self.dimensions, self.absorption, source, self.microphones,
                        self.sample_rate, self.sound_speed, self.max_order)

    @classmethod
    def from_text(cls, text: str) -> RoomSpec:
        """Parse ``key = value`` lines; see ``load_room_spec``."""
        parser = configparser.ConfigParser(inline_comment_prefixes=('#',))
        try:
            parser.read_string('[room]\n' + text)
        except configparser.Error as exc:
            raise ConfigurationError(f'malformed room description: {exc}') from exc
        section = parser['room']
        try:
            max_order = section.get('max_order', 'auto').strip()
            return cls(
                dimensions=_floats(section['dimensions']),
                absorption=_floats(section['absorption']),
                source=_floats(section['source']),
                microphones=[_floats(point) for point in section['microphones'].split(';')
                             if point.strip()],
                sample_rate=section.getint('sample_rate', 16000),
                sound_speed=section.getfloat('sound_speed', 343.0),
                max_order=None if max_order == 'auto' else int(max_order),
            )
        except KeyError as exc:
            raise ConfigurationError(f'room description is missing {exc}') from exc
        except DenbeError:
            raise
        except ValueError as exc:
            raise ConfigurationError(f'bad value in room description: {exc}') from exc


def _floats(value: str) -> list[float]:
    return [float(item) for item in value.replace(',', ' ').split()]


def load_room_spec(path) -> RoomSpec:
    """Read a room description file.

    Keys are ``dimensions``, ``absorption`` (1 or 6 values), ``source``,
    ``microphones`` (``;``-separated triples), ``sound_speed``,
    ``max_order`` (integer or ``auto``) and ``sample_rate``.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f'cannot read room description {path}: {exc}') from exc
    return RoomSpec.from_text(text)


def sabine_t60(room: RoomSpec) -> float:
    absorbing = float(np.sum(room.surface_areas * room.absorption))
    return 0.161 * room.volume / absorbing


def image_sources(room: RoomSpec, max_order: int | None = None):
    """Yield ``(positions, gains, orders)`` blocks of image sources.

    ``gains`` are the wall reflection products; distance attenuation is
    applied by the caller.
    """
    order = room.resolved_order if max_order is None else max_order
    beta = room.reflection
    span = np.arange(-order, order + 1)
    parity = np.array([0, 1])
    # y and z lattices are vectorised; x is iterated
    ny, qy, nz, qz = (a.ravel() for a in np.meshgrid(span, parity, span, parity, indexing='ij'))
    y = (1 - 2 * qy) * room.source[1] + 2 * ny * room.dimensions[1]
    z = (1 - 2 * qz) * room.source[2] + 2 * nz * room.dimensions[2]
    yz_orders = np.abs(ny - qy) + np.abs(ny) + np.abs(nz - qz) + np.abs(nz)
    yz_gains = (beta[2] ** np.abs(ny - qy) * beta[3] ** np.abs(ny)
                * beta[4] ** np.abs(nz - qz) * beta[5] ** np.abs(nz))

    for nx in span:
        for qx in parity:
            x_order = abs(nx - qx) + abs(nx)
            orders = yz_orders + x_order
            keep = orders <= order
            if not np.any(keep):
                continue
            x = (1 - 2 * qx) * room.source[0] + 2 * nx * room.dimensions[0]
            gain = beta[0] ** abs(nx - qx) * beta[1] ** abs(nx)
            positions = np.column_stack((np.full(keep.sum(), x), y[keep], z[keep]))
            yield positions, gain * yz_gains[keep], orders[keep]


def simulate_air(room: RoomSpec) -> list[AcousticImpulseResponse]:
    """One nearest-sample AIR per microphone."""
    distances = np.linalg.norm(room.microphones - room.source, axis=1)
    if np.any(distances < COINCIDENCE_M):
        raise DomainError('source coincides with a microphone')

    blocks = list(image_sources(room))
    positions = np.concatenate([block[0] for block in blocks])
    gains = np.concatenate([block[1] for block in blocks])
    samples_per_metre = room.sample_rate / room.sound_speed

    airs = []
    for microphone in room.microphones:
        distance = np.linalg.norm(positions - microphone, axis=1)
        delays = np.rint(distance * samples_per_metre).astype(int)
        taps = np.zeros(delays.max() + 1)
        np.add.at(taps, delays, gains / distance)
        airs.append(AcousticImpulseResponse(taps, room.sample_rate))
    logger.debug('simulated %d images up to order %d for %d microphones',
                 len(gains), room.resolved_order, len(airs))
    return airs


def render_reverberant(room: RoomSpec, speech: MultichannelAudio,
                       airs: list[AcousticImpulseResponse] | None = None) -> MultichannelAudio:
    """Convolve a mono source with each microphone's AIR (full length)."""
    if speech.channels != 1:
        raise ShapeError(f'render_reverberant needs a mono source, got {speech.channels} channels')
    if speech.sample_rate != room.sample_rate:
        raise ConfigurationError(
            f'source sampled at {speech.sample_rate} Hz, room at {room.sample_rate} Hz')
    responses = airs_to_audio(airs if airs is not None else simulate_air(room))
    rendered = signal.fftconvolve(speech.samples, responses.samples, axes=1)
    return MultichannelAudio(rendered, room.sample_rate)
