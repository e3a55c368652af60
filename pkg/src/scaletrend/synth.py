"""Seeded synthetic-corpus generator.

Plants known scales (with optional per-degree detuning off the 100-cent
grid) and per-year sigma schedules, then emits F0 tracks in the ingest CSV
format plus a ground-truth ledger. Randomness uses numpy's PCG64 keyed by
(seed, year_index, song_index), so corpora are reproducible bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .errors import RangeError
from .ingest import (
    F0Frame,
    F0Track,
    FRAME_PERIOD_S,
    SongMeta,
    cents_to_hz,
    hz_to_cents,
    serialize_f0_csv,
    write_manifest,
)
from .temperament import means_epsilon

CENTS_LO = hz_to_cents(80.0)
CENTS_HI = hz_to_cents(600.0)

# Sung pitch classes repeat across octaves; replicating the planted scale
# into neighboring octaves makes the mode-centered octave window contain
# every pitch class exactly once, whichever class wins the mode.
OCTAVE_SHIFTS = (-1200.0, 0.0, 1200.0)
OCTAVE_WEIGHTS = (0.25, 0.5, 0.25)
RANGE_MARGIN_SIGMAS = 3.0


@dataclass(frozen=True)
class SynthSpec:
    n_years: int
    songs_per_year: int
    frames_per_song: int
    scale_degrees: tuple[float, ...]
    sigma_schedule: Callable[[int], float]
    detune_schedule: Callable[[int], float]
    seed: int
    start_year: int = 1989
    base_cents: float | None = None  # None: center the scale in the vocal range

    def __post_init__(self):
        if not 4 <= len(self.scale_degrees) <= 15:
            raise RangeError(
                f"scale must have 4..15 degrees, got {len(self.scale_degrees)}"
            )

    @classmethod
    def from_dict(cls, obj: dict) -> "SynthSpec":
        """Build a spec from a JSON object with linear schedules
        (sigma_start/sigma_end, detune_start/detune_end)."""
        n_years = int(obj["n_years"])
        return cls(
            n_years=n_years,
            songs_per_year=int(obj["songs_per_year"]),
            frames_per_song=int(obj["frames_per_song"]),
            scale_degrees=tuple(float(d) for d in obj["scale_degrees"]),
            sigma_schedule=linear_schedule(
                float(obj["sigma_start"]), float(obj["sigma_end"]), n_years
            ),
            detune_schedule=linear_schedule(
                float(obj.get("detune_start", 0.0)),
                float(obj.get("detune_end", 0.0)),
                n_years,
            ),
            seed=int(obj.get("seed", 0)),
            start_year=int(obj.get("start_year", 1989)),
            base_cents=(
                float(obj["base_cents"]) if obj.get("base_cents") is not None else None
            ),
        )

    def resolved_base_cents(self) -> float:
        if self.base_cents is not None:
            return self.base_cents
        lo, hi = min(self.scale_degrees), max(self.scale_degrees)
        return (CENTS_LO + CENTS_HI) / 2.0 - (lo + hi) / 2.0


@dataclass(frozen=True)
class PlantedTruth:
    """Ground truth recorded alongside each generated song."""

    song_id: str
    year: int
    means_cents: tuple[float, ...]
    sigma_cents: float
    epsilon_s: float
    detune_cents: float

    def to_dict(self) -> dict:
        return {
            "song_id": self.song_id,
            "year": self.year,
            "means_cents": list(self.means_cents),
            "sigma_cents": self.sigma_cents,
            "epsilon_s": self.epsilon_s,
            "detune_cents": self.detune_cents,
        }


def linear_schedule(start: float, end: float, n_years: int) -> Callable[[int], float]:
    """Value interpolated linearly from start (year 0) to end (last year)."""
    def schedule(year_index: int) -> float:
        if n_years <= 1:
            return start
        return start + (end - start) * year_index / (n_years - 1)
    return schedule


def song_identifier(spec: SynthSpec, year_index: int, song_index: int) -> str:
    return f"{spec.start_year + year_index}-{song_index:02d}"


def generate_song(
    spec: SynthSpec, year_index: int, song_index: int
) -> tuple[F0Track, PlantedTruth]:
    """Sample one song's F0 track from the planted mixture.

    Uniform mixture over the (possibly detuned) scale degrees, replicated
    across neighboring octaves, shared sigma from the year's schedule,
    10 ms hop, confidence 1.0. Values are kept inside the 80-600 Hz vocal
    range so filtering is a no-op. The planted truth records the middle
    octave's class means.
    """
    if not (0 <= year_index < spec.n_years and 0 <= song_index < spec.songs_per_year):
        raise RangeError(
            f"indices ({year_index}, {song_index}) outside spec ranges"
        )
    sigma = spec.sigma_schedule(year_index)
    detune = spec.detune_schedule(year_index)
    if sigma <= 0:
        raise RangeError(f"sigma schedule must be positive, got {sigma}")
    if not 0 <= detune <= 50:
        raise RangeError(f"detune must be in [0, 50], got {detune}")

    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((spec.seed, year_index, song_index)))
    )
    base = spec.resolved_base_cents()
    degrees = np.asarray(spec.scale_degrees, dtype=float)
    offsets = rng.uniform(-detune, detune, len(degrees)) if detune > 0 else np.zeros(len(degrees))
    means = np.sort(base + degrees + offsets)

    # octave copies (with margin) must stay inside the vocal range
    margin = RANGE_MARGIN_SIGMAS * sigma
    lo = means.min() + min(OCTAVE_SHIFTS) - margin
    hi = means.max() + max(OCTAVE_SHIFTS) + margin
    if lo < CENTS_LO or hi > CENTS_HI:
        raise RangeError(
            "planted scale (replicated across octaves) falls outside the "
            "80-600 Hz vocal range"
        )

    comp = rng.integers(0, len(degrees), spec.frames_per_song)
    octave = rng.choice(np.asarray(OCTAVE_SHIFTS), size=spec.frames_per_song,
                        p=np.asarray(OCTAVE_WEIGHTS))
    values = means[comp] + octave + rng.normal(0.0, sigma, spec.frames_per_song)
    hz = np.clip(cents_to_hz(values), 80.0, 600.0)

    song_id = song_identifier(spec, year_index, song_index)
    frames = tuple(
        F0Frame(time_s=round(i * FRAME_PERIOD_S, 2), f0_hz=float(f), confidence=1.0)
        for i, f in enumerate(hz)
    )
    truth = PlantedTruth(
        song_id=song_id,
        year=spec.start_year + year_index,
        means_cents=tuple(float(m) for m in means),
        sigma_cents=float(sigma),
        epsilon_s=means_epsilon(means, song_id=song_id).epsilon_s,
        detune_cents=float(detune),
    )
    return F0Track(song_id=song_id, frames=frames), truth


def generate_corpus(spec: SynthSpec, out_dir) -> tuple[Path, list[PlantedTruth]]:
    """Write per-song CSVs, a JSON-lines manifest, and a truth ledger.

    Returns (manifest path, planted truths).
    """
    out_dir = Path(out_dir)
    f0_dir = out_dir / "f0"
    f0_dir.mkdir(parents=True, exist_ok=True)

    metas: list[SongMeta] = []
    truths: list[PlantedTruth] = []
    for yi in range(spec.n_years):
        for si in range(spec.songs_per_year):
            track, truth = generate_song(spec, yi, si)
            csv_path = f0_dir / f"{track.song_id}.csv"
            csv_path.write_text(serialize_f0_csv(track), encoding="utf-8")
            metas.append(
                SongMeta(
                    song_id=track.song_id,
                    release_year=truth.year,
                    f0_path=str(csv_path),
                    duration_s=spec.frames_per_song * FRAME_PERIOD_S,
                )
            )
            truths.append(truth)

    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(metas, manifest_path)
    with open(out_dir / "truth.jsonl", "w", encoding="utf-8") as fh:
        for t in truths:
            fh.write(json.dumps(t.to_dict()) + "\n")
    return manifest_path, truths
