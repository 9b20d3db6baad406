"""
Signals and rooms shared by the test modules.
"""

import numpy as np

from drr.dsp.isim import RoomSpec
from drr.dsp.mixer import speech_shaped_noise
from drr.dsp.signal_core import MultichannelAudio

FS = 16000


def white(length, channels=1, seed=0, sample_rate=FS):
    rng = np.random.default_rng(seed)
    return MultichannelAudio(rng.standard_normal((channels, length)), sample_rate)


def speech_like(seconds=2.0, seed=0, sample_rate=FS):
    rng = np.random.default_rng(seed)
    samples = speech_shaped_noise(int(seconds * sample_rate), sample_rate, rng)
    return MultichannelAudio.mono(samples, sample_rate)


def room(absorption=0.4, source=(2.3, 2.2, 1.5), spacing=0.05, max_order=None,
         dimensions=(5.0, 4.0, 3.0), sample_rate=FS):
    """Two microphones along x at (2.3, 1.2, 1.5); the default source is broadside at 1 m.

    The array sits off the x = 2.5 mid-plane: a source on that plane reaches
    both microphones through mirror-paired images and the channels come out
    identical.
    """
    center = np.array([2.3, 1.2, 1.5])
    offset = np.array([spacing / 2, 0.0, 0.0])
    return RoomSpec(
        dimensions=dimensions,
        absorption=absorption,
        source=source,
        microphones=[center - offset, center + offset],
        sample_rate=sample_rate,
        max_order=max_order,
    )
