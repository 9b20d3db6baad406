from django.core.management.base import BaseCommand, CommandError

from drr.dsp.estimator import DenbeEstimator
from drr.dsp.ground_truth import airs_from_audio, compute_drr, compute_subband_drr
from drr.dsp.wavio import read_wav
from drr.exceptions import DenbeError
from drr.harness.report import render_json
from drr.harness.runner import parse_variants
from drr.management.commands._options import add_config_arguments, config_from_options
from drr.serializers import DrrResultSerializer


class Command(BaseCommand):
    help = 'Estimate the DRR of one two-channel WAV file and print the results as JSON.'

    def add_arguments(self, parser):
        parser.add_argument('signal', help='two-channel WAV file')
        parser.add_argument('--variants', default='E', help='variant letters, e.g. CE or C,D,E')
        parser.add_argument('--air', help='AIR WAV of the same recording; adds the intrusive truth')
        add_config_arguments(parser)

    def handle(self, *args, **options):
        try:
            config = config_from_options(options)
            variants = parse_variants(options['variants'])
            audio = read_wav(options['signal'])
            estimator = DenbeEstimator(audio.sample_rate, config)
            aligned = estimator.align(audio)
            results = [estimator.estimate(aligned, variant, aligned=True) for variant in variants]
            payload = {'file': options['signal'],
                       'results': DrrResultSerializer(results, many=True).data}
            if options['air']:
                payload['truth'] = self._truth(options['air'], estimator)
        except DenbeError as exc:
            raise CommandError(str(exc)) from exc
        self.stdout.write(render_json(payload).decode(), ending='')

    def _truth(self, path, estimator):
        air = airs_from_audio(read_wav(path))[estimator.config.reference_channel]
        fullband = compute_drr(air)
        subband = compute_subband_drr(air, estimator.grid, order=estimator.config.filter_order)
        return {
            'fullband_db': fullband if fullband != float('inf') else None,
            'band_centers': subband.band_centers,
            'per_band_db': [float(v) if ok else None
                            for v, ok in zip(subband.per_band_db, subband.valid)],
        }
