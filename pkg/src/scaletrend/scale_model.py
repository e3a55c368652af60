"""Scale estimation: tied-variance Gaussian mixtures over a one-octave
window of a song's cents series, with the component count chosen by
maximal silhouette score.

All fitting is seed-deterministic: the same series and seed always give
the same estimate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import (
    DegenerateFitError,
    EmptySeriesError,
    InsufficientDataError,
    InvalidClusteringError,
    NoValidScaleError,
)
from .ingest import CentsSeries

MODE_BIN_CENTS = 5.0  # histogram bin width for the modal pitch
OCTAVE_CENTS = 1200.0
SIGMA_FLOOR_CENTS = 1.0  # below this the fit is considered collapsed

C_MIN_DEFAULT = 4
C_MAX_DEFAULT = 15

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GmmParams:
    """Tied-variance 1-D mixture: sorted means, one shared sigma."""

    means_cents: np.ndarray
    sigma_cents: float
    weights: np.ndarray
    n_components: int
    log_likelihood: float

    def __post_init__(self):
        assert len(self.means_cents) == self.n_components == len(self.weights)


@dataclass(frozen=True)
class ScaleEstimate:
    song_id: str
    gmm: GmmParams
    silhouette: float
    mode_cents: float
    window_lo_cents: float
    window_hi_cents: float
    n_points: int

    def to_dict(self) -> dict:
        return {
            "song_id": self.song_id,
            "means_cents": [float(m) for m in self.gmm.means_cents],
            "sigma_cents": float(self.gmm.sigma_cents),
            "weights": [float(w) for w in self.gmm.weights],
            "n_components": int(self.gmm.n_components),
            "silhouette": float(self.silhouette),
            "mode_cents": float(self.mode_cents),
            "window_lo_cents": float(self.window_lo_cents),
            "window_hi_cents": float(self.window_hi_cents),
            "n_points": int(self.n_points),
        }


@dataclass(frozen=True)
class Assignment:
    """Hard component labels, one per data point."""

    labels: np.ndarray


def modal_f0(series: CentsSeries, bin_width: float = MODE_BIN_CENTS) -> float:
    """Center of the fullest histogram bin (fixed grid anchored at 0 cents).

    Ties break toward the lower bin.
    """
    if len(series) == 0:
        raise EmptySeriesError(f"{series.song_id}: empty cents series")
    idx = np.floor(series.values_cents / bin_width).astype(np.int64)
    # np.unique returns sorted bins; argmax takes the first (lowest) maximum
    bins, counts = np.unique(idx, return_counts=True)
    best = bins[np.argmax(counts)]
    return float((best + 0.5) * bin_width)


def octave_window(series: CentsSeries, mode: float) -> CentsSeries:
    """Restrict to the half-open octave [mode - 600, mode + 600)."""
    v = series.values_cents
    half = OCTAVE_CENTS / 2.0
    kept = v[(v >= mode - half) & (v < mode + half)]
    return CentsSeries(song_id=series.song_id, values_cents=kept)


BIN_CENTS_DEFAULT = 2.0  # sufficient-statistics compression for EM


def _bin_stats(x, bin_cents):
    """Compress x into per-bin weighted means (bins anchored at min(x)).

    Anchoring at the data minimum keeps the compression shift-covariant.
    Returns (bin_values, counts). bin_cents <= 0 disables compression.
    """
    if bin_cents <= 0 or len(x) < 2:
        return x.astype(float), np.ones(len(x))
    xmin = float(x.min())
    idx = np.floor((x - xmin) / bin_cents).astype(np.int64)
    counts = np.bincount(idx)
    sums = np.bincount(idx, weights=x)
    occupied = counts > 0
    return sums[occupied] / counts[occupied], counts[occupied].astype(float)


@njit(cache=True)
def _em_core(xb, w, mu, sigma, wt, tol, max_iter, sigma_floor):
    """Weighted tied-variance EM inner loop.

    Returns (mu, sigma, wt, ll_history, n_entries, degenerate). The history
    holds the log-likelihood before each M-step plus the final value.
    """
    B = xb.shape[0]
    C = mu.shape[0]
    n = 0.0
    x2sum = 0.0
    for i in range(B):
        n += w[i]
        x2sum += w[i] * xb[i] * xb[i]
    hist = np.empty(max_iter + 1)
    t = np.empty(C)
    b = np.empty(C)
    nc = np.empty(C)
    sx = np.empty(C)
    log_2pi = 1.8378770664093453
    nit = 0
    for it in range(max_iter):
        a = 1.0 / (2.0 * sigma * sigma)
        two_a = 2.0 * a
        for c in range(C):
            b[c] = np.log(wt[c]) - a * mu[c] * mu[c] - np.log(sigma) - 0.5 * log_2pi
            nc[c] = 0.0
            sx[c] = 0.0
        ll = 0.0
        for i in range(B):
            xi = xb[i]
            wi = w[i]
            mmax = -1.0e308
            for c in range(C):
                tc = two_a * xi * mu[c] + b[c]
                t[c] = tc
                if tc > mmax:
                    mmax = tc
            s = 0.0
            for c in range(C):
                d = t[c] - mmax
                # terms below exp(-45) are irrelevant at double precision
                e = np.exp(d) if d > -45.0 else 0.0
                t[c] = e
                s += e
            ll += wi * (-a * xi * xi + mmax + np.log(s))
            inv = wi / s
            for c in range(C):
                r = t[c] * inv
                nc[c] += r
                sx[c] += r * xi
        hist[it] = ll
        nit = it + 1

        musq = 0.0
        for c in range(C):
            if nc[c] > 1e-12:
                mu[c] = sx[c] / nc[c]
            musq += nc[c] * mu[c] * mu[c]
        var = (x2sum - musq) / n
        sigma = np.sqrt(var) if var > 0.0 else 0.0
        wsum = 0.0
        for c in range(C):
            wt[c] = nc[c] / n if nc[c] / n > 1e-300 else 1e-300
            wsum += wt[c]
        for c in range(C):
            wt[c] /= wsum
        if sigma < sigma_floor:
            return mu, sigma, wt, hist, nit, True
        if it > 0 and ll - hist[it - 1] < tol:
            break

    # log-likelihood under the returned parameters
    a = 1.0 / (2.0 * sigma * sigma)
    two_a = 2.0 * a
    for c in range(C):
        b[c] = np.log(wt[c]) - a * mu[c] * mu[c] - np.log(sigma) - 0.5 * log_2pi
    ll = 0.0
    for i in range(B):
        xi = xb[i]
        mmax = -1.0e308
        for c in range(C):
            tc = two_a * xi * mu[c] + b[c]
            t[c] = tc
            if tc > mmax:
                mmax = tc
        s = 0.0
        for c in range(C):
            d = t[c] - mmax
            if d > -45.0:
                s += np.exp(d)
        ll += w[i] * (-a * xi * xi + mmax + np.log(s))
    hist[nit] = ll
    nit += 1
    return mu, sigma, wt, hist, nit, False


def _kmeanspp_means(xb, w, C, rng):
    """Weighted k-means++ seeding over binned values.

    Picks spread-out starting means with probability proportional to
    weight times squared distance to the nearest chosen mean, which
    reliably lands one mean per data mode even when modes carry very
    uneven mass.
    """
    probs = w / w.sum()
    means = np.empty(C)
    means[0] = xb[rng.choice(len(xb), p=probs)]
    d2 = (xb - means[0]) ** 2
    for k in range(1, C):
        p = w * d2
        total = p.sum()
        if total <= 0:
            means[k:] = means[0]
            break
        means[k] = xb[rng.choice(len(xb), p=p / total)]
        d2 = np.minimum(d2, (xb - means[k]) ** 2)
    return np.sort(means)


def _em_once(x, C, rng, tol, max_iter, bin_cents=BIN_CENTS_DEFAULT, restart=0):
    """Single EM run; returns (means, sigma, weights, ll_history).

    Raises DegenerateFitError when the shared sigma hits the floor.
    The first restart initializes means at evenly spaced quantiles;
    later restarts use seeded k-means++ picks, which recover modes the
    quantile grid can miss when cluster masses are uneven.
    """
    xb, w = _bin_stats(np.asarray(x, dtype=float), bin_cents)
    span = float(x.max() - x.min())
    if restart == 0 or span == 0:
        q = (np.arange(C) + 0.5) / C
        means = np.quantile(x, q)
        if span > 0:
            means = means + rng.uniform(-1.0, 1.0, C) * span / (4.0 * C)
    else:
        means = _kmeanspp_means(xb, w, C, rng)
    sigma = max(span / (2.0 * C), SIGMA_FLOOR_CENTS)
    weights = np.full(C, 1.0 / C)
    means, sigma, weights, hist, nit, degenerate = _em_core(
        xb, w, means.astype(float), float(sigma), weights, tol, max_iter,
        SIGMA_FLOOR_CENTS,
    )
    if degenerate:
        raise DegenerateFitError(
            f"shared sigma collapsed below {SIGMA_FLOOR_CENTS} cents"
        )
    return means, float(sigma), weights, list(hist[:nit])


def em_fit_once(
    series: CentsSeries,
    C: int,
    seed: int,
    tol: float = 1e-6,
    max_iter: int = 500,
    bin_cents: float = BIN_CENTS_DEFAULT,
):
    """One seeded EM run exposing the log-likelihood trajectory.

    Returns (GmmParams, ll_history). Used directly by monotonicity checks;
    fit_tied_gmm wraps this with restarts.
    """
    x = np.asarray(series.values_cents, dtype=float)
    if len(x) < C:
        raise InsufficientDataError(f"need >= {C} points, got {len(x)}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    means, sigma, weights, history = _em_once(x, C, rng, tol, max_iter, bin_cents)
    order = np.argsort(means, kind="stable")
    params = GmmParams(
        means_cents=means[order],
        sigma_cents=sigma,
        weights=weights[order],
        n_components=C,
        log_likelihood=history[-1],
    )
    return params, history


def fit_tied_gmm(
    series: CentsSeries,
    C: int,
    seed: int,
    tol: float = 1e-6,
    max_iter: int = 500,
    restarts: int = 5,
    bin_cents: float = BIN_CENTS_DEFAULT,
) -> GmmParams:
    """EM fit of a C-component mixture with one shared variance.

    Runs several seeded restarts and keeps the one with the highest final
    log-likelihood. Means come back sorted ascending with their weights.
    """
    x = np.asarray(series.values_cents, dtype=float)
    if len(x) < C:
        raise InsufficientDataError(f"need >= {C} points, got {len(x)}")
    if C < 2:
        raise InsufficientDataError("need at least 2 components")

    best = None
    failures = 0
    children = np.random.SeedSequence(seed).spawn(restarts)
    for restart, child in enumerate(children):
        rng = np.random.Generator(np.random.PCG64(child))
        try:
            means, sigma, weights, history = _em_once(
                x, C, rng, tol, max_iter, bin_cents, restart=restart
            )
        except DegenerateFitError:
            failures += 1
            continue
        if best is None or history[-1] > best[3]:
            best = (means, sigma, weights, history[-1])
    if best is None:
        raise DegenerateFitError(
            f"all {restarts} restarts collapsed for C={C}"
        )
    means, sigma, weights, ll = best
    order = np.argsort(means, kind="stable")
    return GmmParams(
        means_cents=means[order],
        sigma_cents=sigma,
        weights=weights[order],
        n_components=C,
        log_likelihood=ll,
    )


def assign_components(series: CentsSeries, params: GmmParams) -> Assignment:
    """Hard labels by maximum posterior responsibility."""
    x = np.asarray(series.values_cents, dtype=float)
    z = (x[:, None] - params.means_cents[None, :]) / params.sigma_cents
    logp = -0.5 * z * z + np.log(params.weights)
    return Assignment(labels=np.argmax(logp, axis=1))


def silhouette_score(series: CentsSeries, assignment: Assignment) -> float:
    """Mean silhouette of a 1-D clustering, computed exactly.

    Uses sorted per-cluster prefix sums so each point's total distance to a
    cluster is O(log n); overall O(N K log N), identical to the naive O(N^2)
    computation. Points in singleton clusters contribute 0.
    """
    x = np.asarray(series.values_cents, dtype=float)
    labels = np.asarray(assignment.labels)
    if len(x) != len(labels):
        raise InvalidClusteringError("labels and points differ in length")
    uniq = np.unique(labels)
    if len(uniq) < 2:
        raise InvalidClusteringError("silhouette needs at least 2 clusters")

    # per-cluster sorted values and prefix sums
    clusters = {}
    for k in uniq:
        vals = np.sort(x[labels == k])
        prefix = np.concatenate(([0.0], np.cumsum(vals)))
        clusters[k] = (vals, prefix)

    def total_dist(v, k):
        """Sum of |v - y| over all members y of cluster k (vectorized in v)."""
        vals, prefix = clusters[k]
        m = len(vals)
        idx = np.searchsorted(vals, v)
        below = idx * v - prefix[idx]
        above = (prefix[m] - prefix[idx]) - (m - idx) * v
        return below + above

    n = len(x)
    s = np.zeros(n)
    sizes = {k: len(clusters[k][0]) for k in uniq}
    a = np.zeros(n)
    b = np.full(n, np.inf)
    for k in uniq:
        dist_k = total_dist(x, k)
        own = labels == k
        if sizes[k] > 1:
            a[own] = dist_k[own] / (sizes[k] - 1)
        b[~own] = np.minimum(b[~own], dist_k[~own] / sizes[k])
    denom = np.maximum(a, b)
    ok = denom > 0
    s[ok] = (b[ok] - a[ok]) / denom[ok]
    # singleton clusters contribute 0 by convention
    for k in uniq:
        if sizes[k] == 1:
            s[labels == k] = 0.0
    return float(s.mean())


def scale_sweep(
    series: CentsSeries,
    seed: int,
    c_min: int = C_MIN_DEFAULT,
    c_max: int = C_MAX_DEFAULT,
    tol: float = 1e-6,
    max_iter: int = 500,
    restarts: int = 5,
    bin_cents: float = BIN_CENTS_DEFAULT,
):
    """Fit every candidate component count over the octave window.

    Returns (mode, window, [(C, params_or_None, silhouette)]). Degenerate
    fits and clusterings with empty components get silhouette -inf.
    """
    mode = modal_f0(series)
    window = octave_window(series, mode)
    if len(window) < c_max + 1:
        raise InsufficientDataError(
            f"windowed series has {len(window)} points, need >= {c_max + 1}"
        )
    results = []
    for C in range(c_min, c_max + 1):
        fit_seed = np.random.SeedSequence((seed, C)).generate_state(1)[0]
        try:
            params = fit_tied_gmm(
                window, C, int(fit_seed), tol=tol, max_iter=max_iter,
                restarts=restarts, bin_cents=bin_cents,
            )
        except DegenerateFitError:
            results.append((C, None, -np.inf))
            continue
        assignment = assign_components(window, params)
        if len(np.unique(assignment.labels)) < C:
            # empty component after hard assignment invalidates this C
            results.append((C, params, -np.inf))
            continue
        results.append((C, params, silhouette_score(window, assignment)))
    return mode, window, results


def select_scale(
    series: CentsSeries,
    seed: int,
    c_min: int = C_MIN_DEFAULT,
    c_max: int = C_MAX_DEFAULT,
    tol: float = 1e-6,
    max_iter: int = 500,
    restarts: int = 5,
    bin_cents: float = BIN_CENTS_DEFAULT,
) -> ScaleEstimate:
    """Pick the component count with maximal silhouette (ties to smaller C)."""
    mode, window, results = scale_sweep(
        series, seed, c_min=c_min, c_max=c_max, tol=tol, max_iter=max_iter,
        restarts=restarts, bin_cents=bin_cents,
    )
    best = None
    for C, params, sil in results:
        if params is None or not np.isfinite(sil):
            continue
        if best is None or sil > best[2]:
            best = (C, params, sil)
    if best is None:
        raise NoValidScaleError(
            f"{series.song_id}: no component count in [{c_min}, {c_max}] "
            "produced a valid clustering"
        )
    _, params, sil = best
    half = OCTAVE_CENTS / 2.0
    return ScaleEstimate(
        song_id=series.song_id,
        gmm=params,
        silhouette=sil,
        mode_cents=mode,
        window_lo_cents=mode - half,
        window_hi_cents=mode + half,
        n_points=len(window),
    )
