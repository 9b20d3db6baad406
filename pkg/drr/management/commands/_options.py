"""
Flags shared by the estimator-facing commands.

Every flag defaults to None so that only what the user passed overrides
the ``DENBE`` settings.
"""

from drr.conf import DenbeConfig
from drr.dsp.signal_core import WINDOWS


def add_config_arguments(parser):
    group = parser.add_argument_group('estimator configuration')
    group.add_argument('--frame-ms', type=float, help='STFT frame length in milliseconds')
    group.add_argument('--hop-fraction', type=float, help='STFT hop as a fraction of the frame')
    group.add_argument('--window', choices=WINDOWS, help='STFT window')
    group.add_argument('--floor-db', type=float, help='lower clamp and "no estimate" value')
    group.add_argument('--ceil-db', type=float, help='upper clamp')
    group.add_argument('--range-low-hz', type=float, help='fullband integration lower edge')
    group.add_argument('--range-high-hz', type=float, help='fullband integration upper edge')
    group.add_argument('--mic-spacing', type=float, help='microphone spacing in metres')
    group.add_argument('--workers', type=int, help='concurrent trials')
    group.add_argument('--seed', type=int, help='random seed')


def config_from_options(options) -> DenbeConfig:
    return DenbeConfig.from_settings().override(
        frame_ms=options.get('frame_ms'),
        hop_fraction=options.get('hop_fraction'),
        window=options.get('window'),
        floor_db=options.get('floor_db'),
        ceil_db=options.get('ceil_db'),
        range_low_hz=options.get('range_low_hz'),
        range_high_hz=options.get('range_high_hz'),
        mic_spacing_m=options.get('mic_spacing'),
        workers=options.get('workers'),
        seed=options.get('seed'),
    )
