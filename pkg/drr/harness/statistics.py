"""
Error statistics in boxplot form, and real-time factors.

Quartiles are Tukey hinges: the medians of the lower and upper halves of
the sorted errors, the central value excluded when the count is odd.
Whiskers reach the most extreme errors within 1.5 IQR of the box.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from drr.exceptions import ConfigurationError, DomainError

logger = logging.getLogger(__name__)

GROUP_KEYS = ('variant', 'snr_db', 'noise_kind', 'band')
DEFAULT_GROUP_BY = ('variant', 'snr_db', 'noise_kind')
WHISKER_SPAN = 1.5


@dataclass(frozen=True)
class ErrorSummary:
    condition: tuple[tuple[str, object], ...]
    median: float
    q25: float
    q75: float
    whisker_low: float
    whisker_high: float
    count: int

    @property
    def condition_dict(self) -> dict:
        return dict(self.condition)

    @property
    def label(self) -> str:
        return ' '.join(f'{key}={_format(value)}' for key, value in self.condition)

    def quintuple(self) -> tuple[float, float, float, float, float]:
        return (self.whisker_low, self.q25, self.median, self.q75, self.whisker_high)


def _format(value) -> str:
    if value is None:
        return 'clean'
    if isinstance(value, float):
        return f'{value:g}'
    return str(value)


def parse_group_by(value) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [key.strip() for key in value.split(',') if key.strip()]
    keys = tuple(value)
    unknown = [key for key in keys if key not in GROUP_KEYS]
    if unknown or len(set(keys)) != len(keys):
        raise ConfigurationError(
            f'group_by must be distinct keys from {GROUP_KEYS}, got {list(keys)}')
    return keys


def _median(ordered: list[float]) -> float:
    n = len(ordered)
    middle = n // 2
    if n % 2:
        return ordered[middle]
    return (ordered[middle - 1] + ordered[middle]) / 2.0


def box_statistics(errors) -> tuple[float, float, float, float, float]:
    """``(median, q25, q75, whisker_low, whisker_high)`` of a non-empty sample."""
    ordered = sorted(float(e) for e in errors)
    if not ordered:
        raise DomainError('box statistics need at least one value')
    n = len(ordered)
    if n == 1:
        value = ordered[0]
        return value, value, value, value, value
    half = n // 2
    median = _median(ordered)
    q25 = _median(ordered[:half])
    q75 = _median(ordered[n - half:])
    span = WHISKER_SPAN * (q75 - q25)
    whisker_low = min(e for e in ordered if e >= q25 - span)
    whisker_high = max(e for e in ordered if e <= q75 + span)
    return median, q25, q75, whisker_low, whisker_high


def _rows(records, group_by):
    """``(condition, error)`` pairs; ``error`` is None when undefined."""
    for record in records:
        if not record.ok:
            continue
        base = {'variant': record.variant, 'snr_db': record.snr_db,
                'noise_kind': record.noise_kind}
        if 'band' in group_by:
            for center, error in zip(record.band_centers, record.error_bands_db):
                yield tuple((key, center if key == 'band' else base[key]) for key in group_by), error
        else:
            yield tuple((key, base[key]) for key in group_by), record.error_db


def _sort_key(condition):
    # clean (None) conditions first
    return tuple((value is not None, value if value is not None else 0) for _, value in condition)


def summarize(records, group_by=DEFAULT_GROUP_BY) -> list[ErrorSummary]:
    """One ErrorSummary per condition, in sorted condition order.

    Conditions whose records carry no defined error are left out with a
    warning.
    """
    group_by = parse_group_by(group_by)
    groups: dict[tuple, list[float]] = {}
    for condition, error in _rows(records, group_by):
        errors = groups.setdefault(condition, [])
        if error is not None and math.isfinite(error):
            errors.append(float(error))

    summaries = []
    for condition in sorted(groups, key=_sort_key):
        errors = groups[condition]
        if not errors:
            logger.warning('no valid errors for %s; group omitted',
                           ' '.join(f'{k}={_format(v)}' for k, v in condition))
            continue
        median, q25, q75, low, high = box_statistics(errors)
        summaries.append(ErrorSummary(condition, median, q25, q75, low, high, len(errors)))
    return summaries


def measure_rtf(records, variant: str) -> float:
    """Total CPU seconds over total audio seconds for one variant."""
    selected = [record for record in records if record.variant == variant]
    if not selected:
        raise DomainError(f'no records for variant {variant}')
    audio = math.fsum(record.audio_seconds for record in selected)
    if audio <= 0:
        raise DomainError(f'variant {variant} records carry no audio')
    return math.fsum(record.cpu_seconds for record in selected) / audio


def rtf_table(records) -> list[dict]:
    """RTF row per variant present in ``records``, in variant order."""
    rows = []
    for variant in sorted({record.variant for record in records}):
        selected = [record for record in records if record.variant == variant]
        rows.append({
            'variant': variant,
            'files': len(selected),
            'cpu_seconds': math.fsum(r.cpu_seconds for r in selected),
            'audio_seconds': math.fsum(r.audio_seconds for r in selected),
            'rtf': measure_rtf(selected, variant),
        })
    return rows
