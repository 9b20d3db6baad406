from django.core.management.base import BaseCommand, CommandError

from drr.conf import DenbeConfig
from drr.dsp.isim import load_room_spec
from drr.dsp.wavio import read_wav
from drr.exceptions import DenbeError
from drr.harness.corpus import CorpusPlan, generate_corpus


class Command(BaseCommand):
    help = 'Simulate rooms, mix noise at the requested SNRs and write a corpus with its manifest.'

    def add_arguments(self, parser):
        parser.add_argument('output', help='corpus directory')
        parser.add_argument('--snrs', type=float, nargs='+', default=[-1.0, 12.0, 18.0])
        parser.add_argument('--noises', nargs='+', default=['ambient', 'fan', 'babble'],
                            help='noise kinds: ambient/white, fan/pink, babble/babble_surrogate')
        parser.add_argument('--duration', type=float, default=8.0, help='seconds of dry source')
        parser.add_argument('--sample-rate', type=int, default=16000)
        parser.add_argument('--mic-spacing', type=float, help='microphone spacing in metres')
        parser.add_argument('--talkers', type=int, default=8, help='babble talkers')
        parser.add_argument('--seed', type=int, help='random seed')
        parser.add_argument('--speech', help='mono WAV used as the dry source')
        parser.add_argument('--room-config', help='room description file replacing the preset rooms')

    def handle(self, *args, **options):
        defaults = DenbeConfig.from_settings()
        try:
            plan = CorpusPlan(
                snrs=tuple(options['snrs']),
                noises=tuple(options['noises']),
                duration_s=options['duration'],
                sample_rate=options['sample_rate'],
                mic_spacing=options['mic_spacing'] or defaults.mic_spacing_m,
                sound_speed=defaults.sound_speed,
                seed=options['seed'] if options['seed'] is not None else defaults.seed,
                talkers=options['talkers'],
            )
            speech = read_wav(options['speech']) if options['speech'] else None
            room = load_room_spec(options['room_config']) if options['room_config'] else None
            manifest = generate_corpus(options['output'], plan, speech=speech, room=room)
        except (DenbeError, OSError) as exc:
            raise CommandError(str(exc)) from exc
        self.stdout.write(self.style.SUCCESS(f'Wrote {manifest}'))
