"""
Synthetic evaluation corpus: simulated rooms, noise and a manifest.

Every room is paired with each source placement; every placement is mixed
with each noise kind at each SNR. The layout written under the output
directory is::

    airs/<room>_<pos>.wav              two-channel AIR
    trials/<room>_<pos>_<noise>_<snr>.wav
    manifest.txt
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from drr.dsp.ground_truth import airs_to_audio
from drr.dsp.isim import RoomSpec, render_reverberant, simulate_air
from drr.dsp.mixer import generate_noise, mix_at_snr, noise_kind, speech_shaped_noise
from drr.dsp.signal_core import MultichannelAudio
from drr.dsp.wavio import write_wav
from drr.exceptions import ConfigurationError
from drr.harness.manifest import format_entry

logger = logging.getLogger(__name__)

MANIFEST_NAME = 'manifest.txt'


@dataclass(frozen=True)
class RoomPreset:
    name: str
    dimensions: tuple[float, float, float]
    absorption: float


DEFAULT_ROOMS = (
    RoomPreset('office', (4.0, 3.5, 2.7), 0.6),
    RoomPreset('meeting', (5.0, 4.0, 3.0), 0.4),
    RoomPreset('lab', (6.5, 5.0, 3.0), 0.3),
    RoomPreset('lecture', (8.0, 6.0, 3.2), 0.25),
    RoomPreset('hall', (10.0, 7.0, 3.5), 0.2),
)


@dataclass(frozen=True)
class CorpusPlan:
    rooms: tuple[RoomPreset, ...] = DEFAULT_ROOMS
    # (source distance in m, angle from broadside in degrees) per placement
    placements: tuple[tuple[float, float], ...] = ((1.0, 0.0), (2.0, 30.0))
    snrs: tuple[float, ...] = (-1.0, 12.0, 18.0)
    noises: tuple[str, ...] = ('ambient', 'fan', 'babble')
    duration_s: float = 8.0
    sample_rate: int = 16000
    mic_spacing: float = 0.05
    sound_speed: float = 343.0
    seed: int = 0
    talkers: int = 8

    def __post_init__(self):
        for kind in self.noises:
            noise_kind(kind)
        if self.duration_s <= 0:
            raise ConfigurationError('duration must be positive')

    @property
    def trial_count(self) -> int:
        return len(self.rooms) * len(self.placements) * len(self.snrs) * len(self.noises)


def place_array(preset: RoomPreset, distance: float, angle_deg: float, plan: CorpusPlan) -> RoomSpec:
    """Microphone pair along x near one corner, source at ``distance`` in the y-direction."""
    length, width, height = preset.dimensions
    center = np.array([0.45 * length, 0.3 * width, min(1.2, height / 2)])
    offset = np.array([plan.mic_spacing / 2, 0.0, 0.0])
    angle = math.radians(angle_deg)
    source = center + distance * np.array([math.sin(angle), math.cos(angle), 0.0])
    source[2] = min(1.6, height - 0.3)
    return RoomSpec(
        dimensions=preset.dimensions,
        absorption=preset.absorption,
        source=source,
        microphones=[center - offset, center + offset],
        sample_rate=plan.sample_rate,
        sound_speed=plan.sound_speed,
    )


def _snr_tag(snr: float) -> str:
    return f'm{abs(snr):g}' if snr < 0 else f'{snr:g}'


def _dry_source(plan: CorpusPlan, speech: MultichannelAudio | None, rng) -> MultichannelAudio:
    if speech is not None:
        if speech.sample_rate != plan.sample_rate:
            raise ConfigurationError(
                f'dry speech is {speech.sample_rate} Hz, corpus is {plan.sample_rate} Hz')
        return speech.channel(0)
    length = int(round(plan.duration_s * plan.sample_rate))
    return MultichannelAudio.mono(speech_shaped_noise(length, plan.sample_rate, rng),
                                  plan.sample_rate)


def _scenes(plan: CorpusPlan, room: RoomSpec | None):
    if room is not None:
        yield 'room_p0', room
        return
    for preset in plan.rooms:
        for index, (distance, angle) in enumerate(plan.placements):
            yield f'{preset.name}_p{index}', place_array(preset, distance, angle, plan)


def generate_corpus(directory, plan: CorpusPlan | None = None,
                    speech: MultichannelAudio | None = None,
                    room: RoomSpec | None = None) -> Path:
    """Simulate, mix and write the corpus; returns the manifest path.

    ``room`` replaces the preset rooms with a single user-described scene.
    """
    plan = plan or CorpusPlan()
    if room is not None and room.sample_rate != plan.sample_rate:
        raise ConfigurationError(
            f'room is {room.sample_rate} Hz, corpus is {plan.sample_rate} Hz')
    directory = Path(directory)
    (directory / 'airs').mkdir(parents=True, exist_ok=True)
    (directory / 'trials').mkdir(parents=True, exist_ok=True)

    lines = [f'# synthetic corpus, seed {plan.seed}',
             '# signal  air  noise_kind  snr_db']
    for scene_index, (tag, scene) in enumerate(_scenes(plan, room)):
        rng = np.random.default_rng([plan.seed, scene_index])
        airs = simulate_air(scene)
        air_path = write_wav(directory / 'airs' / f'{tag}.wav', airs_to_audio(airs))
        reverberant = render_reverberant(scene, _dry_source(plan, speech, rng), airs)

        for kind_index, kind in enumerate(plan.noises):
            noise = generate_noise(kind, reverberant.length, plan.sample_rate,
                                   channels=reverberant.channels, room=scene,
                                   seed=[plan.seed, scene_index, kind_index],
                                   talkers=plan.talkers)
            for snr in plan.snrs:
                name = f'{tag}_{kind}_{_snr_tag(snr)}.wav'
                write_wav(directory / 'trials' / name, mix_at_snr(reverberant, noise, snr))
                lines.append(format_entry(f'trials/{name}', f'airs/{air_path.name}', kind, snr))
        logger.info('scene %s written', tag)

    manifest = directory / MANIFEST_NAME
    manifest.write_text('\n'.join(lines) + '\n')
    logger.info('wrote %s (%d trials)', manifest, len(lines) - 2)
    return manifest
