"""
Report files for a finished run.

  csv       summary.csv (one row per condition) and records.csv
  json      report.json with the summaries and the records
  plotdata  plotdata.csv, one boxplot quintuple per condition

Timing goes to timing.csv / timing.json next to them, so the files above
are byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

from rest_framework.renderers import JSONRenderer

from drr.exceptions import ConfigurationError
from drr.harness.statistics import ErrorSummary, parse_group_by, rtf_table
from drr.serializers import (
    RECORD_FIELDS,
    TIMING_FIELDS,
    ErrorSummarySerializer,
    RtfSerializer,
    TimingSerializer,
    TrialRecordSerializer,
)

logger = logging.getLogger(__name__)

FORMATS = ('csv', 'json', 'plotdata')
SUMMARY_COLUMNS = ['count', 'median', 'q25', 'q75', 'whisker_low', 'whisker_high']
PLOT_COLUMNS = ['condition', 'whisker_low', 'q25', 'median', 'q75', 'whisker_high', 'count']


def parse_formats(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [item.strip() for item in value.split(',') if item.strip()]
    formats = tuple(dict.fromkeys(value))
    unknown = [item for item in formats if item not in FORMATS]
    if unknown or not formats:
        raise ConfigurationError(f'formats must be chosen from {FORMATS}, got {list(value)}')
    return formats


def render_json(data) -> bytes:
    return JSONRenderer().render(data, renderer_context={'indent': 2}) + b'\n'


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, (list, dict)):
        return json.dumps(value)
    return value


def _write_csv(path: Path, header: list[str], rows) -> Path:
    with path.open('w', newline='') as handle:
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return path


def _write_summary_csv(path, summaries, group_by):
    rows = ([summary.condition_dict.get(key) for key in group_by]
            + [getattr(summary, column) for column in SUMMARY_COLUMNS] for summary in summaries)
    return _write_csv(path, list(group_by) + SUMMARY_COLUMNS, rows)


def _write_records_csv(path, records):
    data = TrialRecordSerializer(records, many=True).data
    return _write_csv(path, RECORD_FIELDS, ([row[field] for field in RECORD_FIELDS] for row in data))


def _write_plotdata(path, summaries):
    rows = ([summary.label, *summary.quintuple(), summary.count] for summary in summaries)
    return _write_csv(path, PLOT_COLUMNS, rows)


def _write_timing(directory: Path, records, formats) -> list[Path]:
    timing = TimingSerializer(records, many=True).data
    rtf = RtfSerializer(rtf_table(records), many=True).data if records else []
    written = []
    if 'json' in formats:
        path = directory / 'timing.json'
        path.write_bytes(render_json({'records': timing, 'rtf': rtf}))
        written.append(path)
    if 'csv' in formats:
        written.append(_write_csv(directory / 'timing.csv', TIMING_FIELDS,
                                  ([row[field] for field in TIMING_FIELDS] for row in timing)))
    return written


def emit_report(summaries: list[ErrorSummary], records, directory, formats=FORMATS,
                group_by=None) -> list[Path]:
    """Write the requested report files into ``directory``; returns their paths.

    ``group_by`` names the condition columns; it defaults to the keys of the
    first summary.
    """
    formats = parse_formats(formats)
    if group_by is None:
        group_by = [key for key, _ in summaries[0].condition] if summaries else []
    group_by = parse_group_by(group_by)
    records = list(records)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    written = []
    if 'csv' in formats:
        written.append(_write_summary_csv(directory / 'summary.csv', summaries, group_by))
        written.append(_write_records_csv(directory / 'records.csv', records))
    if 'json' in formats:
        path = directory / 'report.json'
        path.write_bytes(render_json({
            'group_by': list(group_by),
            'summaries': ErrorSummarySerializer(summaries, many=True).data,
            'records': TrialRecordSerializer(records, many=True).data,
        }))
        written.append(path)
    if 'plotdata' in formats:
        written.append(_write_plotdata(directory / 'plotdata.csv', summaries))
    written.extend(_write_timing(directory, records, formats))
    for path in written:
        logger.info('wrote %s', path)
    return written


def load_summaries(path) -> list[ErrorSummary]:
    """Summaries back from a ``report.json``."""
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise ConfigurationError(f'cannot read report {path}: {exc}') from exc
    serializer = ErrorSummarySerializer(data=payload.get('summaries', []), many=True)
    if not serializer.is_valid():
        raise ConfigurationError(f'malformed summaries in {path}: {serializer.errors}')
    return serializer.save()
