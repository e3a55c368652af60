"""Standalone SVG scatter-plus-fit emission for trend reports.

SVGs are written by hand (no plotting framework) with fixed float
formatting, so regenerating from the same report yields byte-identical
files.
"""

from __future__ import annotations

from pathlib import Path

from .errors import InsufficientDataError
from .stats import TrendReport, RegressionResult, rows_to_csv

WIDTH, HEIGHT = 640, 420
MARGIN = 56

_TRENDS = (
    ("sigma_trend", "sigma_cents", "GMM shared sigma (cents)"),
    ("components_trend", "n_components", "GMM component count"),
    ("epsilon_trend", "epsilon_s", "grid deviation (cents)"),
)


def _fmt(x: float) -> str:
    return format(float(x), ".4f")


def _scatter_svg(
    points: list[tuple[float, float]], fit: RegressionResult, ylabel: str
) -> str:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    fit_ends = [fit.intercept + fit.slope * x for x in (x_lo, x_hi)]
    y_lo = min(y_lo, *fit_ends)
    y_hi = max(y_hi, *fit_ends)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    # pad the y range so extreme points are not on the frame
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    def px(x: float) -> float:
        return MARGIN + (x - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    # axis extremes as tick labels
    parts.append(
        f'<text x="{MARGIN}" y="{HEIGHT - MARGIN + 18}" font-size="12" '
        f'text-anchor="middle">{_fmt(x_lo)}</text>'
    )
    parts.append(
        f'<text x="{WIDTH - MARGIN}" y="{HEIGHT - MARGIN + 18}" font-size="12" '
        f'text-anchor="middle">{_fmt(x_hi)}</text>'
    )
    parts.append(
        f'<text x="{MARGIN - 6}" y="{HEIGHT - MARGIN}" font-size="12" '
        f'text-anchor="end">{_fmt(y_lo)}</text>'
    )
    parts.append(
        f'<text x="{MARGIN - 6}" y="{MARGIN + 4}" font-size="12" '
        f'text-anchor="end">{_fmt(y_hi)}</text>'
    )
    parts.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 12}" font-size="13" '
        f'text-anchor="middle">release year</text>'
    )
    parts.append(
        f'<text x="{WIDTH / 2}" y="{MARGIN - 16}" font-size="13" '
        f'text-anchor="middle">{ylabel} (r={_fmt(fit.r)}, p={_fmt(fit.p_value)})</text>'
    )
    for x, y in points:
        parts.append(
            f'<circle cx="{_fmt(px(x))}" cy="{_fmt(py(y))}" r="3" '
            f'fill="steelblue" fill-opacity="0.7"/>'
        )
    parts.append(
        f'<line x1="{_fmt(px(x_lo))}" y1="{_fmt(py(fit_ends[0]))}" '
        f'x2="{_fmt(px(x_hi))}" y2="{_fmt(py(fit_ends[1]))}" '
        f'stroke="crimson" stroke-width="2"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plots(report: TrendReport, destination) -> list[Path]:
    """Write one scatter+fit SVG per trend plus the underlying rows CSV.

    Returns the written paths.
    """
    if not report.rows:
        raise InsufficientDataError("trend report has no rows to plot")
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    for trend_name, field, ylabel in _TRENDS:
        fit = getattr(report, trend_name)
        points = [(float(r.year), float(getattr(r, field))) for r in report.rows]
        path = dest / f"{trend_name}.svg"
        path.write_text(_scatter_svg(points, fit, ylabel), encoding="utf-8")
        written.append(path)
    csv_path = dest / "rows.csv"
    csv_path.write_text(rows_to_csv(report.rows), encoding="utf-8")
    written.append(csv_path)
    return written
