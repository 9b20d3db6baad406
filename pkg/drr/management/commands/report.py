from django.core.management.base import BaseCommand, CommandError

from drr.exceptions import DenbeError
from drr.harness.report import emit_report, parse_formats
from drr.harness.statistics import measure_rtf, parse_group_by, summarize
from drr.models import EvaluationRun


class Command(BaseCommand):
    help = 'Write error statistics and timing of a stored evaluation run.'

    def add_arguments(self, parser):
        parser.add_argument('output', help='directory for the report files')
        parser.add_argument('--run', type=int, help='run id (default: the latest run)')
        parser.add_argument('--group-by', default='variant,snr_db,noise_kind',
                            help='comma-separated keys from variant, snr_db, noise_kind, band')
        parser.add_argument('--format', default='csv,json,plotdata',
                            help='comma-separated formats from csv, json, plotdata')

    def handle(self, *args, **options):
        run = self._run(options['run'])
        records = list(run.records.all())
        try:
            group_by = parse_group_by(options['group_by'])
            formats = parse_formats(options['format'])
            summaries = summarize(records, group_by)
            written = emit_report(summaries, records, options['output'], formats, group_by)
        except (DenbeError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        for path in written:
            self.stdout.write(f'wrote {path}')
        for variant in run.variants:
            try:
                rtf = measure_rtf(records, variant)
            except DenbeError:
                continue
            self.stdout.write(f'RTF {variant}: {rtf:.4f}')

    def _run(self, run_id):
        queryset = EvaluationRun.objects.all()
        try:
            return queryset.get(pk=run_id) if run_id is not None else queryset.latest('created_at')
        except EvaluationRun.DoesNotExist:
            raise CommandError(f'no evaluation run {run_id if run_id is not None else "stored"}')
