"""Toolkit for estimating sung scales from F0 time series and testing
longitudinal tuning trends across a corpus."""

__version__ = "0.1.0"

from .ingest import (
    CentsSeries,
    CorpusSummary,
    F0Frame,
    F0Track,
    SongMeta,
    cents_to_hz,
    corpus_summary,
    filter_frames,
    hz_to_cents,
    parse_f0_csv,
    to_cents_series,
)
from .scale_model import (
    Assignment,
    GmmParams,
    ScaleEstimate,
    fit_tied_gmm,
    modal_f0,
    octave_window,
    select_scale,
    silhouette_score,
)
from .stats import (
    RegressionResult,
    SongRecord,
    TrendReport,
    build_trend_report,
    ols_regression,
    t_sf,
)
from .synth import PlantedTruth, SynthSpec, generate_corpus, generate_song
from .temperament import TemperamentError, pair_epsilon, song_epsilon

__all__ = [
    "Assignment",
    "CentsSeries",
    "CorpusSummary",
    "F0Frame",
    "F0Track",
    "GmmParams",
    "PlantedTruth",
    "RegressionResult",
    "ScaleEstimate",
    "SongMeta",
    "SongRecord",
    "SynthSpec",
    "TemperamentError",
    "TrendReport",
    "build_trend_report",
    "cents_to_hz",
    "corpus_summary",
    "filter_frames",
    "fit_tied_gmm",
    "generate_corpus",
    "generate_song",
    "hz_to_cents",
    "modal_f0",
    "octave_window",
    "ols_regression",
    "pair_epsilon",
    "parse_f0_csv",
    "select_scale",
    "silhouette_score",
    "song_epsilon",
    "t_sf",
    "to_cents_series",
]
