"""
Corpus runner: every manifest entry through every requested variant.

Entries run on a bounded thread pool; records come back in manifest order.
CPU time is the calling thread's CPU time around the estimator call only,
so it stays per-trial under concurrency.
"""

from __future__ import annotations

import logging
import math
import threading
import time
from concurrent.futures import ThreadPoolExecutor

from drr.conf import DenbeConfig
from drr.dsp.estimator import VARIANTS, DenbeEstimator
from drr.dsp.ground_truth import airs_from_audio, compute_drr, compute_subband_drr
from drr.dsp.wavio import read_wav
from drr.exceptions import ConfigurationError, DenbeError
from drr.harness.manifest import ManifestEntry
from drr.models import TrialRecord

logger = logging.getLogger(__name__)


def parse_variants(value) -> tuple[str, ...]:
    """``"CE"``, ``"C,E"`` or an iterable of letters, in canonical order."""
    letters = {letter.upper() for letter in value if letter not in ', '}
    unknown = letters - set(VARIANTS)
    if unknown or not letters:
        raise ConfigurationError(
            f'variants must be a non-empty subset of {"".join(VARIANTS)}, got {value!r}')
    return tuple(letter for letter in VARIANTS if letter in letters)


class _EstimatorCache:
    """One DenbeEstimator per sample rate, shared by the worker threads."""

    def __init__(self, config: DenbeConfig):
        self.config = config
        self._estimators = {}
        self._lock = threading.Lock()

    def get(self, sample_rate: int) -> DenbeEstimator:
        with self._lock:
            if sample_rate not in self._estimators:
                self._estimators[sample_rate] = DenbeEstimator(sample_rate, self.config)
            return self._estimators[sample_rate]


def _finite_or_none(value) -> float | None:
    value = float(value)
    return value if math.isfinite(value) else None


def _ground_truth(entry: ManifestEntry, estimator: DenbeEstimator, with_bands: bool):
    if entry.air_path is None:
        return _finite_or_none(entry.truth_db), []
    airs = airs_from_audio(read_wav(entry.air_path))
    air = airs[estimator.config.reference_channel]
    truth_db = _finite_or_none(compute_drr(air))
    bands = []
    if with_bands:
        subband = compute_subband_drr(air, estimator.grid, order=estimator.config.filter_order)
        bands = [float(v) if ok else None for v, ok in zip(subband.per_band_db, subband.valid)]
    return truth_db, bands


def _base_record(entry: ManifestEntry, variant: str) -> TrialRecord:
    return TrialRecord(
        position=entry.position,
        file_id=entry.file_id,
        variant=variant,
        snr_db=entry.snr_db,
        noise_kind=entry.noise_kind,
    )


def _failed(entry: ManifestEntry, variants, message: str) -> list[TrialRecord]:
    records = []
    for variant in variants:
        record = _base_record(entry, variant)
        record.status = TrialRecord.STATUS_ERROR
        record.message = message
        records.append(record)
    return records


def run_entry(entry: ManifestEntry, variants, estimators: _EstimatorCache) -> list[TrialRecord]:
    try:
        audio = read_wav(entry.signal_path)
        estimator = estimators.get(audio.sample_rate)
        truth_db, truth_bands = _ground_truth(
            entry, estimator, with_bands=any(v in ('F', 'G') for v in variants))
    except (DenbeError, OSError) as exc:
        logger.warning('skipping %s: %s', entry.file_id, exc)
        return _failed(entry, variants, str(exc))

    records = []
    for variant in variants:
        record = _base_record(entry, variant)
        record.truth_db = truth_db
        record.truth_bands_db = truth_bands
        record.audio_seconds = audio.duration
        cpu_start, wall_start = time.thread_time(), time.perf_counter()
        try:
            result = estimator.estimate(audio, variant)
        except DenbeError as exc:
            record.status = TrialRecord.STATUS_ERROR
            record.message = str(exc)
            records.append(record)
            continue
        finally:
            record.cpu_seconds = max(0.0, time.thread_time() - cpu_start)
            record.wall_seconds = max(0.0, time.perf_counter() - wall_start)

        record.estimate_db = result.fullband_db
        if truth_db is not None:
            record.error_db = result.fullband_db - truth_db
        if result.has_bands:
            record.band_centers = list(result.band_centers)
            record.estimate_bands_db = [float(v) for v in result.per_band_db]
            record.band_valid = [bool(v) for v in result.band_valid]
            if truth_bands:
                record.error_bands_db = [
                    est - truth if ok and truth is not None else None
                    for est, ok, truth in zip(record.estimate_bands_db, record.band_valid,
                                              truth_bands)
                ]
        records.append(record)
    logger.info('%s: %s done', entry.file_id, ''.join(variants))
    return records


def run_corpus(entries: list[ManifestEntry], variants, config: DenbeConfig | None = None,
               workers: int | None = None) -> list[TrialRecord]:
    """Unsaved TrialRecords, one per (entry, variant), in manifest order."""
    variants = parse_variants(variants)
    config = config or DenbeConfig()
    workers = workers or config.workers
    estimators = _EstimatorCache(config)
    logger.info('running %d files through variants %s on %d workers',
                len(entries), ''.join(variants), workers)

    if workers == 1:
        batches = [run_entry(entry, variants, estimators) for entry in entries]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda entry: run_entry(entry, variants, estimators), entries))

    records = [record for batch in batches for record in batch]
    failed = sum(1 for record in records if not record.ok)
    logger.info('finished %d records, %d failed', len(records), failed)
    return records

