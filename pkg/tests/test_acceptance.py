"""Acceptance gate: end-to-end checks at stated tolerances.

Each test prints one PASS/FAIL line (bypassing pytest capture) so the
criterion-level outcome is visible in any log.
"""

import time

import numpy as np

from conftest import record_acceptance
from oracles import circular_class_distance, naive_silhouette
from scaletrend.cli import main as cli_main
from scaletrend.ingest import (
    SongMeta,
    corpus_summary,
    F0Frame,
    F0Track,
    hz_to_cents,
    to_cents_series,
)
from scaletrend.scale_model import (
    Assignment,
    em_fit_once,
    fit_tied_gmm,
    select_scale,
    silhouette_score,
)
from scaletrend.stats import SongRecord, build_trend_report, ols_regression, t_sf
from scaletrend.synth import SynthSpec, generate_corpus, generate_song, linear_schedule
from scaletrend.temperament import pair_epsilon, song_epsilon
from scaletrend.ingest import CentsSeries


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    line = f"[ACCEPTANCE] {name}: {status}"
    if detail:
        line += f" ({detail})"
    print(line)
    record_acceptance(line)


def analyze_corpus(spec: SynthSpec, seed: int = 0):
    """Run per-song scale estimation on an in-memory synthetic corpus."""
    rows, truths, estimates = [], [], []
    for yi in range(spec.n_years):
        for si in range(spec.songs_per_year):
            track, truth = generate_song(spec, yi, si)
            series = to_cents_series(track)
            est = select_scale(series, seed=seed + 1000 * yi + si)
            rows.append(
                SongRecord(
                    song_id=truth.song_id,
                    year=truth.year,
                    sigma_cents=est.gmm.sigma_cents,
                    n_components=est.gmm.n_components,
                    epsilon_s=song_epsilon(est).epsilon_s,
                    silhouette=est.silhouette,
                )
            )
            truths.append(truth)
            estimates.append(est)
    return rows, truths, estimates


def test_planted_scale_recovery():
    spec = SynthSpec(
        n_years=1,
        songs_per_year=50,
        frames_per_song=20000,
        scale_degrees=(0.0, 200.0, 400.0, 700.0, 900.0),
        sigma_schedule=linear_schedule(20.0, 20.0, 1),
        detune_schedule=linear_schedule(0.0, 0.0, 1),
        seed=1001,
    )
    songs = [generate_song(spec, 0, si) for si in range(50)]
    t0 = time.perf_counter()
    hits = 0
    mean_err_max = 0.0
    sigma_err_max = 0.0
    for track, truth in songs:
        est = select_scale(to_cents_series(track), seed=42)
        if est.gmm.n_components != 5:
            continue
        hits += 1
        for planted in truth.means_cents:
            err = min(
                circular_class_distance(m, planted)
                for m in est.gmm.means_cents
            )
            mean_err_max = max(mean_err_max, err)
        sigma_err_max = max(sigma_err_max, abs(est.gmm.sigma_cents - 20.0))
    elapsed = time.perf_counter() - t0
    ok = (
        hits >= 45
        and mean_err_max <= 5.0
        and sigma_err_max <= 3.0
        and elapsed < 60.0
    )
    report(
        "planted-scale recovery (C=5, means +-5c, sigma +-3c, <60s)",
        ok,
        f"C=5 in {hits}/50, max mean err {mean_err_max:.2f}c, "
        f"max sigma err {sigma_err_max:.2f}c, {elapsed:.1f}s",
    )
    assert ok


def test_variance_trend_reproduction():
    spec = SynthSpec(
        n_years=28,
        songs_per_year=3,
        frames_per_song=3000,
        scale_degrees=(0.0, 200.0, 400.0, 700.0),
        sigma_schedule=linear_schedule(40.0, 12.0, 28),
        detune_schedule=linear_schedule(0.0, 0.0, 28),
        seed=2002,
    )
    t0 = time.perf_counter()
    rows, _, _ = analyze_corpus(spec, seed=7)
    trend = build_trend_report(rows).sigma_trend
    elapsed = time.perf_counter() - t0
    ok = (
        trend.slope < 0
        and trend.r <= -0.8
        and trend.p_value < 1e-3
        and elapsed < 90.0
    )
    report(
        "variance trend (slope<0, r<=-0.8, p<0.001, <90s)",
        ok,
        f"slope {trend.slope:.3f}, r {trend.r:.3f}, p {trend.p_value:.2e}, "
        f"{elapsed:.1f}s",
    )
    assert ok


def test_temperament_trend_reproduction():
    spec = SynthSpec(
        n_years=28,
        songs_per_year=3,
        frames_per_song=3000,
        scale_degrees=(0.0, 200.0, 400.0, 700.0),
        sigma_schedule=linear_schedule(15.0, 15.0, 28),
        detune_schedule=linear_schedule(45.0, 5.0, 28),
        seed=3003,
    )
    rows, _, _ = analyze_corpus(spec, seed=11)
    trend = build_trend_report(rows).epsilon_trend
    trend_ok = trend.slope < 0 and trend.p_value < 1e-2

    zero_spec = SynthSpec(
        n_years=3,
        songs_per_year=2,
        frames_per_song=3000,
        scale_degrees=(0.0, 200.0, 400.0, 700.0),
        sigma_schedule=linear_schedule(15.0, 15.0, 3),
        detune_schedule=linear_schedule(0.0, 0.0, 3),
        seed=3004,
    )
    zero_rows, zero_truths, _ = analyze_corpus(zero_spec, seed=13)
    planted_ok = all(abs(t.epsilon_s) <= 1e-9 for t in zero_truths)
    estimated_ok = all(r.epsilon_s <= 6.0 for r in zero_rows)

    ok = trend_ok and planted_ok and estimated_ok
    report(
        "temperament trend (eps slope<0, p<0.01; detune=0 gives eps~0)",
        ok,
        f"slope {trend.slope:.3f}, p {trend.p_value:.2e}, "
        f"max est eps {max(r.epsilon_s for r in zero_rows):.2f}c",
    )
    assert ok


def test_silhouette_oracle_equivalence():
    rng = np.random.default_rng(404)
    worst = 0.0
    checked = 0
    while checked < 100:
        n = int(rng.integers(10, 501))
        k = int(rng.integers(2, 16))
        x = rng.uniform(0, 2000, n)
        labels = rng.integers(0, k, n)
        if len(np.unique(labels)) < 2:
            continue
        fast = silhouette_score(
            CentsSeries(song_id="s", values_cents=x), Assignment(labels=labels)
        )
        worst = max(worst, abs(fast - naive_silhouette(x, labels)))
        checked += 1
    ok = worst <= 1e-9
    report(
        "silhouette fast == naive O(N^2) within 1e-9 on 100 instances",
        ok,
        f"max abs diff {worst:.2e}",
    )
    assert ok


def test_em_correctness():
    rng = np.random.default_rng(505)
    degrees = np.array([0.0, 200.0, 400.0, 700.0, 900.0])
    worst_drop = 0.0
    for i in range(100):
        n = int(rng.integers(500, 3000))
        comp = rng.integers(0, 5, n)
        x = 4000.0 + degrees[comp] + rng.normal(0, 25.0, n)
        series = CentsSeries(song_id="s", values_cents=x)
        _, hist = em_fit_once(series, C=int(rng.integers(3, 9)), seed=i)
        if len(hist) > 1:
            worst_drop = max(worst_drop, float(-np.diff(hist).min()))
    mono_ok = worst_drop <= 1e-7

    x = 4000.0 + degrees[rng.integers(0, 5, 4000)] + rng.normal(0, 20.0, 4000)
    a = fit_tied_gmm(CentsSeries(song_id="s", values_cents=x), C=5, seed=3)
    b = fit_tied_gmm(CentsSeries(song_id="s", values_cents=x + 251.5), C=5, seed=3)
    shift_err = float(np.max(np.abs(b.means_cents - a.means_cents - 251.5)))
    shift_err = max(shift_err, abs(b.sigma_cents - a.sigma_cents))
    shift_ok = shift_err <= 1e-6

    ok = mono_ok and shift_ok
    report(
        "EM log-likelihood monotone (100 fits) + shift invariance 1e-6",
        ok,
        f"worst LL drop {worst_drop:.2e}, shift err {shift_err:.2e}",
    )
    assert ok


def test_epsilon_identities():
    checks = [
        abs(pair_epsilon(0.0, 50.0) - 50.0),
        abs(pair_epsilon(1234.0, 2470.0) - 36.0),
        abs(
            np.mean([pair_epsilon(a, b) for a, b in [(0, 50), (0, 100), (50, 100)]])
            - 100.0 / 3.0
        ),
        abs(pair_epsilon(123.4, 567.8) - pair_epsilon(567.8, 123.4)),
        abs(pair_epsilon(123.4 + 700.0, 567.8) - pair_epsilon(123.4, 567.8)),
    ]
    worst = max(checks)
    ok = worst <= 1e-9
    report(
        "epsilon identities (symmetry, 100c translation, hand cases)",
        ok,
        f"max abs err {worst:.2e}",
    )
    assert ok


def test_cents_conversion():
    rng = np.random.default_rng(606)
    freqs = rng.uniform(20.0, 5000.0, 200)
    additivity = max(
        abs(hz_to_cents(2 * f) - hz_to_cents(f) - 1200.0) / 1200.0 for f in freqs
    )
    a440 = hz_to_cents(440.0)
    ok = additivity <= 1e-9 and abs(a440 - 5699.96) <= 0.01
    report(
        "cents conversion (octave additivity, 440Hz -> 5699.96 +- 0.01)",
        ok,
        f"additivity {additivity:.2e}, 440Hz -> {a440:.4f}c",
    )
    assert ok


def test_statistics(tmp_path):
    p = t_sf(12.706, 1)
    t_ok = 0.0499 <= p <= 0.0501

    rng = np.random.default_rng(707)
    x = rng.uniform(1989, 2016, 80)
    y = -1.2 * x + rng.normal(0, 8.0, 80)
    res = ols_regression(x, y)
    resid = y - (res.intercept + res.slope * x)
    ortho = abs(float(np.sum(resid * (x - x.mean()))))
    ortho_ok = ortho <= 1e-9 * float(np.linalg.norm(y))

    spec = SynthSpec(
        n_years=3,
        songs_per_year=2,
        frames_per_song=2000,
        scale_degrees=(0.0, 200.0, 400.0, 700.0),
        sigma_schedule=linear_schedule(25.0, 15.0, 3),
        detune_schedule=linear_schedule(0.0, 0.0, 3),
        seed=808,
    )
    corpus = tmp_path / "corpus"
    manifest, _ = generate_corpus(spec, corpus)
    payloads = []
    for workers in (1, 2):
        out = tmp_path / f"w{workers}"
        rc = cli_main(
            ["analyze-corpus", str(manifest), "--seed", "5",
             "--out", str(out), "--workers", str(workers)]
        )
        assert rc == 0
        payloads.append((out / "report.json").read_bytes())
    det_ok = payloads[0] == payloads[1]

    ok = t_ok and ortho_ok and det_ok
    report(
        "statistics (t_sf point, residual orthogonality, report determinism)",
        ok,
        f"t_sf(12.706,1)={p:.5f}, ortho {ortho:.2e}, "
        f"byte-identical={det_ok}",
    )
    assert ok


def test_table1_arithmetic():
    metas, tracks = [], []
    for i in range(99):
        year = 1989 + (i % 28)
        metas.append(
            SongMeta(
                song_id=f"s{i:02d}", release_year=year,
                f0_path="unused.csv", duration_s=240.0,
            )
        )
        frames = tuple(F0Frame(j * 0.01, 220.0, 1.0) for j in range(100))
        tracks.append(F0Track(song_id=f"s{i:02d}", frames=frames))
    summary = corpus_summary(metas, tracks)
    ok = abs(summary.songs_per_year_avg - 3.54) <= 0.01
    report(
        "corpus arithmetic (99 songs over 1989-2016 -> 3.54 +- 0.01 songs/yr)",
        ok,
        f"songs_per_year_avg {summary.songs_per_year_avg:.4f}",
    )
    assert ok
