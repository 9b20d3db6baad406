"""
Corpus manifests.

One trial per line::

    <signal.wav>  <air.wav | truth_db>  <noise_kind>  <snr_db>

Paths are relative to the manifest file. ``#`` starts a comment. The SNR
may be ``inf`` (or ``clean``) for a noise-free trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from drr.exceptions import ConfigurationError

CLEAN = ('inf', '+inf', 'clean', 'none')


@dataclass(frozen=True)
class ManifestEntry:
    position: int
    file_id: str
    signal_path: Path
    noise_kind: str
    snr_db: float | None
    air_path: Path | None = None
    truth_db: float | None = None


def _parse_snr(value: str, lineno: int) -> float | None:
    if value.lower() in CLEAN:
        return None
    try:
        snr = float(value)
    except ValueError:
        raise ConfigurationError(f'line {lineno}: SNR {value!r} is not a number') from None
    if not math.isfinite(snr):
        raise ConfigurationError(f'line {lineno}: SNR must be finite or "inf"')
    return snr


def parse_manifest(text: str, base_dir=None) -> list[ManifestEntry]:
    base = Path(base_dir) if base_dir is not None else Path('.')
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise ConfigurationError(
                f'line {lineno}: expected 4 fields (signal, truth, noise kind, SNR), '
                f'got {len(fields)}')
        signal, truth, kind, snr = fields
        signal_path = base / signal
        air_path, truth_db = None, None
        try:
            truth_db = float(truth)
        except ValueError:
            air_path = base / truth
        entries.append(ManifestEntry(
            position=len(entries),
            file_id=Path(signal).stem,
            signal_path=signal_path,
            noise_kind=kind,
            snr_db=_parse_snr(snr, lineno),
            air_path=air_path,
            truth_db=truth_db,
        ))
    return entries


def load_manifest(path) -> list[ManifestEntry]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f'cannot read manifest {path}: {exc}') from exc
    return parse_manifest(text, path.parent)


def format_entry(signal: str, truth: str | float, noise_kind: str, snr_db: float | None) -> str:
    snr = 'inf' if snr_db is None else f'{snr_db:g}'
    return f'{signal} {truth} {noise_kind} {snr}'
