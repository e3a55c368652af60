"""Command-line surface: per-song analysis, corpus trend reports, corpus
summaries, and synthetic corpus generation.

Exit codes: 0 success, 1 input format error, 2 degenerate song
(single-song mode), 3 insufficient corpus.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import (
    DegenerateRegressorError,
    EmptyCorpusError,
    InsufficientDataError,
    NoValidScaleError,
    ScaletrendError,
)
from .ingest import (
    corpus_summary,
    filter_frames,
    parse_f0_csv,
    read_manifest,
    to_cents_series,
)
from .plots import emit_plots
from .scale_model import C_MAX_DEFAULT, C_MIN_DEFAULT, select_scale
from .serialize import canonical_dumps
from .stats import SongRecord, build_trend_report, rows_to_csv
from .synth import SynthSpec, generate_corpus
from .temperament import song_epsilon

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DEGENERATE = 2
EXIT_CORPUS = 3


@dataclass(frozen=True)
class GmmConfig:
    seed: int = 0
    c_min: int = C_MIN_DEFAULT
    c_max: int = C_MAX_DEFAULT
    tol: float = 1e-6
    max_iter: int = 500
    restarts: int = 5

    def overrides(self) -> dict:
        return {
            "c_min": self.c_min,
            "c_max": self.c_max,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "restarts": self.restarts,
        }


def song_seed(global_seed: int, song_id: str) -> int:
    """Stable per-song seed derived from the global seed and song id."""
    digest = hashlib.sha256(f"{global_seed}:{song_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def repro_block(cfg: GmmConfig) -> dict:
    return {"seed": cfg.seed, "version": __version__, "overrides": cfg.overrides()}


def _error_json(exc: Exception) -> str:
    return canonical_dumps({"error": type(exc).__name__, "message": str(exc)})


def analyze_one(csv_path: str, song_id: str, cfg: GmmConfig) -> dict:
    """Analyze one F0 CSV into a per-song record dict.

    Returns a record with status "ok" or "skipped" (zero retained frames
    or no valid scale). Parse errors propagate.
    """
    with open(csv_path, "rb") as fh:
        track = parse_f0_csv(fh, song_id=song_id)
    series = to_cents_series(filter_frames(track))
    if len(series) == 0:
        return {"song_id": song_id, "status": "skipped", "reason": "no retained frames"}
    try:
        estimate = select_scale(
            series,
            seed=song_seed(cfg.seed, song_id),
            c_min=cfg.c_min,
            c_max=cfg.c_max,
            tol=cfg.tol,
            max_iter=cfg.max_iter,
            restarts=cfg.restarts,
        )
    except (InsufficientDataError, NoValidScaleError) as exc:
        return {"song_id": song_id, "status": "skipped", "reason": str(exc)}
    temper = song_epsilon(estimate)
    return {
        "song_id": song_id,
        "status": "ok",
        "scale": estimate.to_dict(),
        "temperament": temper.to_dict(),
    }


def _corpus_worker(args) -> dict:
    """Top-level worker for the corpus pool (must be picklable)."""
    song_id, year, csv_path, cfg = args
    try:
        record = analyze_one(csv_path, song_id, cfg)
    except (OSError, ScaletrendError) as exc:
        record = {
            "song_id": song_id,
            "status": "skipped",
            "reason": f"{type(exc).__name__}: {exc}",
        }
    record["year"] = year
    return record


def cmd_analyze_song(args) -> int:
    cfg = _gmm_config(args)
    song_id = Path(args.f0_csv).stem
    try:
        record = analyze_one(args.f0_csv, song_id, cfg)
    except (OSError, ScaletrendError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_INPUT
    record["repro"] = repro_block(cfg)
    payload = canonical_dumps(record) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return EXIT_DEGENERATE if record["status"] == "skipped" else EXIT_OK


def cmd_analyze_corpus(args) -> int:
    cfg = _gmm_config(args)
    try:
        metas = read_manifest(args.manifest)
    except (OSError, ScaletrendError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_INPUT

    jobs = [(m.song_id, m.release_year, m.f0_path, cfg) for m in metas]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            records = list(pool.map(_corpus_worker, jobs))
    else:
        records = [_corpus_worker(job) for job in jobs]

    rows = [
        SongRecord(
            song_id=r["song_id"],
            year=r["year"],
            sigma_cents=r["scale"]["sigma_cents"],
            n_components=r["scale"]["n_components"],
            epsilon_s=r["temperament"]["epsilon_s"],
            silhouette=r["scale"]["silhouette"],
        )
        for r in records
        if r["status"] == "ok"
    ]
    skipped = sorted(
        (
            {"song_id": r["song_id"], "reason": r["reason"]}
            for r in records
            if r["status"] == "skipped"
        ),
        key=lambda s: s["song_id"],
    )
    try:
        report = build_trend_report(rows)
    except (InsufficientDataError, DegenerateRegressorError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_CORPUS

    out_dir = Path(args.out or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = report.to_dict()
    payload["skipped"] = skipped
    payload["repro"] = repro_block(cfg)
    (out_dir / "report.json").write_text(
        canonical_dumps(payload) + "\n", encoding="utf-8"
    )
    (out_dir / "rows.csv").write_text(rows_to_csv(report.rows), encoding="utf-8")
    if args.plots:
        emit_plots(report, args.plots)
    return EXIT_OK


def cmd_summarize(args) -> int:
    try:
        metas = read_manifest(args.manifest)
        tracks = []
        for m in metas:
            with open(m.f0_path, "rb") as fh:
                tracks.append(filter_frames(parse_f0_csv(fh, song_id=m.song_id)))
        summary = corpus_summary(metas, tracks)
    except EmptyCorpusError as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_CORPUS
    except (OSError, ScaletrendError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_INPUT
    payload = canonical_dumps(summary.to_dict()) + "\n"
    if args.out:
        Path(args.out).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return EXIT_OK


def cmd_synth(args) -> int:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            spec = SynthSpec.from_dict(json.load(fh))
    except (OSError, KeyError, ValueError, ScaletrendError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_INPUT
    manifest_path, truths = generate_corpus(spec, args.out or ".")
    sys.stdout.write(
        canonical_dumps(
            {"manifest": str(manifest_path), "n_songs": len(truths)}
        )
        + "\n"
    )
    return EXIT_OK


def _gmm_config(args) -> GmmConfig:
    return GmmConfig(
        seed=args.seed,
        c_min=args.c_min,
        c_max=args.c_max,
        tol=args.tol,
        max_iter=args.max_iter,
        restarts=args.restarts,
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)


def _add_gmm_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--c-min", type=int, default=C_MIN_DEFAULT)
    parser.add_argument("--c-max", type=int, default=C_MAX_DEFAULT)
    parser.add_argument("--tol", type=float, default=1e-6)
    parser.add_argument("--max-iter", type=int, default=500)
    parser.add_argument("--restarts", type=int, default=5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scaletrend",
        description="Estimate sung scales from F0 tracks and test "
        "longitudinal tuning trends.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze-song", help="analyze one F0 CSV")
    p.add_argument("f0_csv")
    _add_common(p)
    _add_gmm_flags(p)
    p.set_defaults(func=cmd_analyze_song)

    p = sub.add_parser("analyze-corpus", help="trend report over a manifest")
    p.add_argument("manifest")
    _add_common(p)
    _add_gmm_flags(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--plots", default=None, help="directory for SVG trend plots")
    p.set_defaults(func=cmd_analyze_corpus)

    p = sub.add_parser("summarize", help="corpus summary statistics")
    p.add_argument("manifest")
    _add_common(p)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("synth", help="generate a synthetic oracle corpus")
    p.add_argument("spec", help="JSON synthesis spec")
    _add_common(p)
    p.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "c_min", C_MIN_DEFAULT) < 2 or getattr(args, "c_max", C_MAX_DEFAULT) > 30:
        sys.stderr.write(
            _error_json(ValueError("component range must lie within [2, 30]")) + "\n"
        )
        return EXIT_INPUT
    if getattr(args, "workers", 1) < 1:
        sys.stderr.write(_error_json(ValueError("workers must be >= 1")) + "\n")
        return EXIT_INPUT
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
