"""CSV and SVG writers for experiment tables and metrics reports."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

TRIAL_HEADER = ["mode", "m", "trial", "tau", "relative_error", "snr_db", "iterations",
                "converged", "seed_base", "seed_labels"]
AGGREGATE_HEADER = ["mode", "m", "m_over_s", "tau", "success_rate", "mean_snr_db", "trials"]
SUITE_HEADER = ["battery", "statistic", "threshold", "passed", "detail"]


class OutputError(OSError):
    pass


def fmt(value) -> str:
    """Floats with 9 significant digits; everything else via ``str``."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.9g}"
    return str(value)


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc


def write_trials_csv(records, path):
    _write_csv(Path(path), TRIAL_HEADER,
               ([getattr(r, k) for k in TRIAL_HEADER] for r in records))


def write_aggregate_csv(rows, path):
    _write_csv(Path(path), AGGREGATE_HEADER,
               ([getattr(r, k) for k in AGGREGATE_HEADER] for r in rows))


def write_suite_csv(report, path):
    _write_csv(Path(path), SUITE_HEADER,
               ([getattr(r, k) for k in SUITE_HEADER] for r in report.rows))


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def svg_line_plot(series, xlabel: str, ylabel: str, title: str = "",
                  width: int = 640, height: int = 420) -> str:
    """Minimal SVG 1.1 line chart. ``series`` is a list of ``(label, xs, ys)``."""
    left, right, top, bottom = 70, 150, 40, 60
    pts = [(x, y) for _, xs, ys in series for x, y in zip(xs, ys) if math.isfinite(y)]
    xmin = min(p[0] for p in pts)
    xmax = max(p[0] for p in pts)
    ymin = min(0.0, min(p[1] for p in pts))
    ymax = max(p[1] for p in pts)
    if xmax == xmin:
        xmax = xmin + 1.0
    if ymax == ymin:
        ymax = ymin + 1.0
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - xmin) / (xmax - xmin) * pw

    def sy(y):
        return top + ph - (y - ymin) / (ymax - ymin) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for i in range(6):
        xv = xmin + i * (xmax - xmin) / 5
        yv = ymin + i * (ymax - ymin) / 5
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{xv:.3g}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" font-size="11" '
                   f'text-anchor="end">{yv:.3g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 15}" font-size="13" '
               f'text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="18" y="{top + ph / 2:.1f}" font-size="13" text-anchor="middle" '
               f'transform="rotate(-90 18 {top + ph / 2:.1f})">{escape(ylabel)}</text>')
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="22" font-size="14" '
                   f'text-anchor="middle">{escape(title)}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        ly = top + 14 + 16 * k
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}" font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _plot_series(table):
    taus = sorted({r.tau for r in table.rows})
    noisy = table.mode == "pocs-noisy"
    series = []
    for tau in taus:
        rows = sorted((r for r in table.rows if r.tau == tau), key=lambda r: r.m)
        ys = [r.mean_snr_db if noisy else r.success_rate for r in rows]
        label = f"-log10(tau/pi)={-math.log10(tau / math.pi):.2f}" if noisy and tau > 0 else table.mode
        series.append((label, [r.m_over_s for r in rows], ys))
    ylabel = "mean SNR (dB)" if noisy else "success rate"
    return series, ylabel


def emit_outputs(table, out_dir, metadata: dict | None = None) -> dict:
    """Write ``trials.csv``, ``aggregate.csv`` and (when non-empty) ``curve.svg``.

    Returns a mapping from output kind to path.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out}: {exc.strerror or exc}") from exc
    paths = {"trials": out / "trials.csv", "aggregate": out / "aggregate.csv"}
    write_trials_csv(table.records, paths["trials"])
    write_aggregate_csv(table.rows, paths["aggregate"])
    if table.rows:
        series, ylabel = _plot_series(table)
        if any(math.isfinite(y) for _, _, ys in series for y in ys):
            paths["plot"] = out / "curve.svg"
            _write_text(paths["plot"], svg_line_plot(series, "m/s", ylabel, table.mode))
    if metadata:
        paths["metadata"] = out / "metadata.txt"
        _write_text(paths["metadata"], "".join(f"{k} = {v}\n" for k, v in metadata.items()))
    return paths


def _write_text(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from exc
