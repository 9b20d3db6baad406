"""
WAV reading and writing through soundfile.

Reads PCM 16/24/32-bit and 32-bit float files of any channel count and
returns floating point samples in [-1, 1] (float files are passed through
unchanged).
"""

from __future__ import annotations

from pathlib import Path

import soundfile as sf

from drr.dsp.signal_core import MultichannelAudio
from drr.exceptions import ConfigurationError

SUBTYPES = ('PCM_16', 'PCM_24', 'PCM_32', 'FLOAT')


def read_wav(path) -> MultichannelAudio:
    try:
        data, sample_rate = sf.read(str(path), dtype='float64', always_2d=True)
    except RuntimeError as exc:
        raise ConfigurationError(f'cannot read {path}: {exc}') from exc
    return MultichannelAudio(data.T, sample_rate)


def write_wav(path, audio: MultichannelAudio, subtype: str = 'FLOAT') -> Path:
    if subtype not in SUBTYPES:
        raise ConfigurationError(f'unsupported WAV subtype {subtype!r}; expected one of {SUBTYPES}')
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), audio.samples.T, audio.sample_rate, subtype=subtype, format='WAV')
    return path
