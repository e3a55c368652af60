"""Trend statistics: ordinary least squares against release year with
Pearson r and two-tailed p-values from the t-distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import betainc

from .errors import DegenerateRegressorError, DomainError, InsufficientDataError


@dataclass(frozen=True)
class RegressionResult:
    slope: float
    intercept: float
    r: float
    p_value: float
    n: int

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r": self.r,
            "p_value": self.p_value,
            "n": self.n,
        }


@dataclass(frozen=True)
class SongRecord:
    """One usable song's metrics for the trend report."""

    song_id: str
    year: int
    sigma_cents: float
    n_components: int
    epsilon_s: float
    silhouette: float

    def to_dict(self) -> dict:
        return {
            "song_id": self.song_id,
            "year": self.year,
            "sigma_cents": self.sigma_cents,
            "n_components": self.n_components,
            "epsilon_s": self.epsilon_s,
            "silhouette": self.silhouette,
        }


@dataclass(frozen=True)
class TrendReport:
    sigma_trend: RegressionResult
    components_trend: RegressionResult
    epsilon_trend: RegressionResult
    rows: tuple[SongRecord, ...]

    def to_dict(self) -> dict:
        return {
            "n_songs": len(self.rows),
            "sigma_trend": self.sigma_trend.to_dict(),
            "components_trend": self.components_trend.to_dict(),
            "epsilon_trend": self.epsilon_trend.to_dict(),
            "rows": [r.to_dict() for r in self.rows],
        }


ROWS_CSV_HEADER = "song_id,year,sigma_cents,n_components,epsilon_s,silhouette"


def rows_to_csv(rows: Sequence[SongRecord]) -> str:
    lines = [ROWS_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.song_id},{r.year},{r.sigma_cents!r},{r.n_components},"
            f"{r.epsilon_s!r},{r.silhouette!r}"
        )
    return "\n".join(lines) + "\n"


def t_sf(t: float, df: int) -> float:
    """Two-tailed survival probability 2*P(T >= |t|) for Student's t.

    Computed through the regularized incomplete beta function
    I_x(df/2, 1/2) with x = df / (df + t^2).
    """
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df}")
    t = float(t)
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return float(betainc(df / 2.0, 0.5, x))


def ols_regression(x: Sequence[float], y: Sequence[float]) -> RegressionResult:
    """Least-squares line fit with Pearson r and two-tailed p.

    Constant y gives slope 0, r = 0, p = 1 (degenerate-input convention);
    constant x is an error. p comes from t = r*sqrt((n-2)/(1-r^2)) against
    the t-distribution with n-2 degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise DomainError("x and y must have equal length")
    n = len(x)
    if n < 2:
        raise InsufficientDataError(f"need >= 2 points, got {n}")
    xbar = x.mean()
    ybar = y.mean()
    dx = x - xbar
    dy = y - ybar
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    sxy = float(dx @ dy)
    if sxx == 0.0:
        raise DegenerateRegressorError("x values are all identical")
    if syy == 0.0:
        return RegressionResult(slope=0.0, intercept=ybar, r=0.0, p_value=1.0, n=n)

    slope = sxy / sxx
    intercept = ybar - slope * xbar
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    if n < 3 or r * r >= 1.0:
        p = 0.0 if r != 0.0 else 1.0
    else:
        t = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = t_sf(t, n - 2)
    return RegressionResult(slope=slope, intercept=intercept, r=r, p_value=p, n=n)


def build_trend_report(rows: Sequence[SongRecord]) -> TrendReport:
    """Regress sigma, component count, and grid deviation on release year."""
    if len(rows) < 3:
        raise InsufficientDataError(f"need >= 3 usable songs, got {len(rows)}")
    ordered = tuple(sorted(rows, key=lambda r: (r.year, r.song_id)))
    years = [r.year for r in ordered]
    return TrendReport(
        sigma_trend=ols_regression(years, [r.sigma_cents for r in ordered]),
        components_trend=ols_regression(years, [r.n_components for r in ordered]),
        epsilon_trend=ols_regression(years, [r.epsilon_s for r in ordered]),
        rows=ordered,
    )
