import dataclasses

from django.core.management.base import BaseCommand, CommandError
from django.db import transaction

from drr.exceptions import DenbeError
from drr.harness.manifest import load_manifest
from drr.harness.report import emit_report, parse_formats
from drr.harness.runner import parse_variants, run_corpus
from drr.harness.statistics import summarize
from drr.management.commands._options import add_config_arguments, config_from_options
from drr.models import EvaluationRun, TrialRecord


class Command(BaseCommand):
    help = 'Run every file of a manifest through the selected variants and store the records.'

    def add_arguments(self, parser):
        parser.add_argument('manifest', help='manifest file, one trial per line')
        parser.add_argument('--variants', default='CDEFG', help='variant letters, e.g. CDEFG')
        parser.add_argument('--name', default='', help='label stored with the run')
        parser.add_argument('--output', help='also write csv/json/plotdata reports here')
        parser.add_argument('--format', default='csv,json,plotdata',
                            help='report formats when --output is given')
        add_config_arguments(parser)

    def handle(self, *args, **options):
        try:
            config = config_from_options(options)
            variants = parse_variants(options['variants'])
            formats = parse_formats(options['format'])
            entries = load_manifest(options['manifest'])
            records = run_corpus(entries, variants, config)
        except DenbeError as exc:
            raise CommandError(str(exc)) from exc

        with transaction.atomic():
            run = EvaluationRun.objects.create(
                name=options['name'],
                manifest=str(options['manifest']),
                variants=''.join(variants),
                seed=config.seed,
                config=dataclasses.asdict(config),
            )
            for record in records:
                record.run = run
            TrialRecord.objects.bulk_create(records)

        failed = sum(1 for record in records if not record.ok)
        self.stdout.write(self.style.SUCCESS(
            f'Run {run.pk}: {len(records)} records ({failed} failed) from {len(entries)} files'))

        if options['output']:
            try:
                summaries = summarize(records)
                emit_report(summaries, records, options['output'], formats)
            except (DenbeError, OSError) as exc:
                raise CommandError(str(exc)) from exc
