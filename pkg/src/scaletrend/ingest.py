"""F0 track ingestion: CSV parsing, heuristic filtering, cents conversion,
manifests and corpus summaries.

The CSV format is the standard monophonic pitch-tracker output: a
``time,frequency,confidence`` header followed by one frame per row,
one frame every 10 ms.
"""

from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    EmptyCorpusError,
    FormatError,
    ParseError,
    RangeError,
)

log = logging.getLogger(__name__)

C0_HZ = 16.352  # reference tone anchoring the cents scale
FRAME_PERIOD_S = 0.01  # pitch-tracker hop used for duration accounting

F0_CSV_HEADER = "time,frequency,confidence"

# Default filtering heuristics (male vocal range, tracker confidence).
F_MIN_HZ = 80.0
F_MAX_HZ = 600.0
CONF_MIN = 0.8


@dataclass(frozen=True)
class F0Frame:
    """One pitch-tracker frame."""

    time_s: float
    f0_hz: float
    confidence: float


@dataclass(frozen=True)
class F0Track:
    """Ordered F0 frames for one song."""

    song_id: str
    frames: tuple[F0Frame, ...]

    def __len__(self) -> int:
        return len(self.frames)

    def times(self) -> np.ndarray:
        return np.array([f.time_s for f in self.frames], dtype=float)

    def f0s(self) -> np.ndarray:
        return np.array([f.f0_hz for f in self.frames], dtype=float)

    def confidences(self) -> np.ndarray:
        return np.array([f.confidence for f in self.frames], dtype=float)


@dataclass(frozen=True)
class SongMeta:
    """Manifest entry for one song."""

    song_id: str
    release_year: int
    f0_path: str
    duration_s: float | None = None


@dataclass(frozen=True)
class CentsSeries:
    """Filtered pitch values in cents above C0."""

    song_id: str
    values_cents: np.ndarray

    def __len__(self) -> int:
        return len(self.values_cents)


@dataclass(frozen=True)
class CorpusSummary:
    n_songs: int
    songs_per_year_avg: float
    song_duration_avg_s: float
    song_duration_std_s: float
    total_duration_s: float
    f0_ratio_avg: float
    f0_ratio_std: float
    total_f0_duration_s: float

    def to_dict(self) -> dict:
        return {
            "n_songs": self.n_songs,
            "songs_per_year_avg": self.songs_per_year_avg,
            "song_duration_avg_s": self.song_duration_avg_s,
            "song_duration_std_s": self.song_duration_std_s,
            "total_duration_s": self.total_duration_s,
            "f0_ratio_avg": self.f0_ratio_avg,
            "f0_ratio_std": self.f0_ratio_std,
            "total_f0_duration_s": self.total_f0_duration_s,
        }


def hz_to_cents(f0_hz):
    """Convert Hz to cents above C0 (16.352 Hz).

    Accepts scalars or numpy arrays. Raises DomainError on non-positive
    input.
    """
    arr = np.asarray(f0_hz, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("frequency must be positive for cents conversion")
    out = 1200.0 * np.log2(arr / C0_HZ)
    return float(out) if np.isscalar(f0_hz) or arr.ndim == 0 else out


def cents_to_hz(cents):
    """Inverse of hz_to_cents."""
    arr = np.asarray(cents, dtype=float)
    out = C0_HZ * np.exp2(arr / 1200.0)
    return float(out) if np.isscalar(cents) or arr.ndim == 0 else out


def parse_f0_csv(source, song_id: str = "") -> F0Track:
    """Parse pitch-tracker CSV output into an F0Track.

    ``source`` may be a str, bytes, or a text/binary file object. Rows are
    returned in file order. Malformed rows raise with their 1-based row
    number (the header is row 1).
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    lines = text.splitlines()
    if not lines or lines[0].strip() != F0_CSV_HEADER:
        raise FormatError(f"expected header '{F0_CSV_HEADER}'")

    frames = []
    prev_t = None
    for rownum, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ParseError(rownum, f"expected 3 fields, got {len(parts)}")
        try:
            t, f0, conf = (float(p) for p in parts)
        except ValueError:
            raise ParseError(rownum, f"non-numeric field in '{line}'") from None
        if not (0.0 <= conf <= 1.0):
            raise RangeError(f"confidence {conf} outside [0, 1]", row=rownum)
        if f0 <= 0:
            raise RangeError(f"frequency {f0} not positive", row=rownum)
        if t < 0:
            raise RangeError(f"time {t} negative", row=rownum)
        if prev_t is not None and t < prev_t:
            log.warning("%s: non-monotone timestamp at row %d", song_id, rownum)
        prev_t = t
        frames.append(F0Frame(t, f0, conf))
    return F0Track(song_id=song_id, frames=tuple(frames))


def serialize_f0_csv(track: F0Track) -> str:
    """Render an F0Track back into the CSV ingest format.

    Floats use shortest-roundtrip formatting so parse(serialize(x)) == x.
    """
    out = io.StringIO()
    out.write(F0_CSV_HEADER + "\n")
    for f in track.frames:
        out.write(f"{f.time_s!r},{f.f0_hz!r},{f.confidence!r}\n")
    return out.getvalue()


def filter_frames(
    track: F0Track,
    f_min: float = F_MIN_HZ,
    f_max: float = F_MAX_HZ,
    conf_min: float = CONF_MIN,
) -> F0Track:
    """Keep frames with f_min <= f0 <= f_max and confidence >= conf_min.

    Endpoints are inclusive: the heuristics discard values strictly
    outside the frequency range or strictly below the confidence cut.
    """
    if not f_min < f_max:
        raise DomainError("f_min must be < f_max")
    kept = tuple(
        f
        for f in track.frames
        if f_min <= f.f0_hz <= f_max and f.confidence >= conf_min
    )
    return F0Track(song_id=track.song_id, frames=kept)


def to_cents_series(track: F0Track) -> CentsSeries:
    """Element-wise Hz-to-cents conversion of an (already filtered) track."""
    if not track.frames:
        return CentsSeries(song_id=track.song_id, values_cents=np.empty(0))
    values = hz_to_cents(track.f0s())
    return CentsSeries(song_id=track.song_id, values_cents=np.asarray(values))


def read_manifest(path) -> list[SongMeta]:
    """Read a JSON-lines manifest (keys: song_id, year, f0_path, duration_s)."""
    metas: list[SongMeta] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for rownum, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError:
                raise ParseError(rownum, "invalid JSON") from None
            try:
                song_id = str(obj["song_id"])
                year = int(obj["year"])
                f0_path = str(obj["f0_path"])
            except KeyError as exc:
                raise FormatError(f"manifest line {rownum}: missing key {exc}")
            if not 1900 <= year <= 2100:
                raise RangeError(f"year {year} outside [1900, 2100]", row=rownum)
            if song_id in seen:
                raise FormatError(f"duplicate song_id '{song_id}' at line {rownum}")
            seen.add(song_id)
            duration = obj.get("duration_s")
            metas.append(
                SongMeta(
                    song_id=song_id,
                    release_year=year,
                    f0_path=f0_path,
                    duration_s=float(duration) if duration is not None else None,
                )
            )
    return metas


def write_manifest(metas: Iterable[SongMeta], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for m in metas:
            obj = {"song_id": m.song_id, "year": m.release_year, "f0_path": m.f0_path}
            if m.duration_s is not None:
                obj["duration_s"] = m.duration_s
            fh.write(json.dumps(obj) + "\n")


def corpus_summary(
    manifest: Sequence[SongMeta], tracks: Sequence[F0Track]
) -> CorpusSummary:
    """Corpus-level statistics over filtered tracks.

    songs_per_year_avg divides the song count by the number of calendar
    years spanned (inclusive). F0 duration per song assumes the 10 ms
    frame period; duration stats use population standard deviation.
    """
    if not manifest:
        raise EmptyCorpusError("manifest is empty")
    if len(manifest) != len(tracks):
        raise DomainError("manifest and tracks must match one-to-one")

    years = [m.release_year for m in manifest]
    n_years = max(years) - min(years) + 1
    songs_per_year = len(manifest) / n_years

    durations = np.array(
        [m.duration_s for m in manifest if m.duration_s is not None], dtype=float
    )
    f0_durations = np.array([len(t) * FRAME_PERIOD_S for t in tracks], dtype=float)
    ratios = np.array(
        [
            len(t) * FRAME_PERIOD_S / m.duration_s
            for m, t in zip(manifest, tracks)
            if m.duration_s is not None and m.duration_s > 0
        ],
        dtype=float,
    )

    return CorpusSummary(
        n_songs=len(manifest),
        songs_per_year_avg=songs_per_year,
        song_duration_avg_s=float(durations.mean()) if durations.size else 0.0,
        song_duration_std_s=float(durations.std()) if durations.size else 0.0,
        total_duration_s=float(durations.sum()),
        f0_ratio_avg=float(ratios.mean()) if ratios.size else 0.0,
        f0_ratio_std=float(ratios.std()) if ratios.size else 0.0,
        total_f0_duration_s=float(f0_durations.sum()),
    )
