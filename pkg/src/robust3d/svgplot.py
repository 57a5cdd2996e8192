"""Minimal hand-rolled SVG charts for evaluation reports.

Two chart kinds mirror the usual robustness figures: AP versus severity
(one polyline per corruption, severity rows only) and AP versus stratum
(bar chart over stratified rows). Output is plain SVG built by string
assembly so tests can assert structure (circle/rect counts) without any
imaging dependency.
"""

from __future__ import annotations

from .evaluation import EvalReport

_W, _H = 640, 400
_ML, _MR, _MT, _MB = 60, 160, 30, 50
_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#4b0082",
)


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _svg_header(title: str) -> list[str]:
    return [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<title>{_esc(title)}</title>',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]


def _axes(lines: list[str], y_label: str) -> None:
    x0, y0, x1, y1 = _ML, _H - _MB, _W - _MR, _MT
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    lines.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = y0 - frac * (y0 - y1)
        lines.append(
            f'<text x="{x0 - 8}" y="{y + 4:.1f}" font-size="11" text-anchor="end">'
            f"{frac * 100:.0f}</text>"
        )
        lines.append(f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>')
    lines.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" font-size="12" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})" text-anchor="middle">'
        f"{_esc(y_label)}</text>"
    )


def _y_pos(ap_percent: float) -> float:
    y0, y1 = _H - _MB, _MT
    return y0 - max(0.0, min(100.0, ap_percent)) / 100.0 * (y0 - y1)


def severity_chart(report: EvalReport, threshold_index: int = 0) -> str:
    """AP vs severity. One circle per (corruption, severity) row with
    stratum "all"; the uncorrupted baseline shows as a dashed line."""
    t = report.iou_thresholds[threshold_index]
    rows = [r for r in report.rows if r.stratum == "all" and r.severity is not None]
    baseline = next(
        (r for r in report.rows if r.stratum == "all" and r.corruption == "none"), None
    )
    lines = _svg_header(f"AP@{t:g} vs severity")
    _axes(lines, f"AP@{t:g} (%)")
    x0, x1 = _ML, _W - _MR
    xs = {lvl: x0 + (x1 - x0) * (lvl - 0.5) / 3.0 for lvl in (1, 2, 3)}
    for lvl, x in xs.items():
        lines.append(
            f'<text x="{x:.1f}" y="{_H - _MB + 18}" font-size="11" text-anchor="middle">S{lvl}</text>'
        )
    if baseline is not None:
        y = _y_pos(baseline.ap_percent[threshold_index])
        lines.append(
            f'<line class="baseline" x1="{x0}" y1="{y:.1f}" x2="{x1}" y2="{y:.1f}" '
            f'stroke="#888" stroke-dasharray="6 3"/>'
        )
        lines.append(
            f'<text x="{x1 + 6}" y="{y + 4:.1f}" font-size="11" fill="#888">none</text>'
        )
    corruptions = sorted({r.corruption for r in rows})
    for ci, kind in enumerate(corruptions):
        color = _PALETTE[ci % len(_PALETTE)]
        pts = sorted(
            ((r.severity, r.ap_percent[threshold_index]) for r in rows if r.corruption == kind)
        )
        coords = [(xs[lvl], _y_pos(ap)) for lvl, ap in pts if lvl in xs]
        if len(coords) > 1:
            path = " ".join(f"{x:.1f},{y:.1f}" for x, y in coords)
            lines.append(f'<polyline points="{path}" fill="none" stroke="{color}"/>')
        for x, y in coords:
            lines.append(f'<circle class="pt" cx="{x:.1f}" cy="{y:.1f}" r="4" fill="{color}"/>')
        ly = _MT + 14 * (ci + 1)
        lines.append(f'<rect x="{x1 + 6}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        lines.append(f'<text x="{x1 + 20}" y="{ly}" font-size="11">{_esc(kind)}</text>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def strata_chart(report: EvalReport, threshold_index: int = 0) -> str:
    """AP vs stratum bar chart over every row with a non-global stratum."""
    t = report.iou_thresholds[threshold_index]
    rows = [r for r in report.rows if r.stratum != "all"]
    lines = _svg_header(f"AP@{t:g} by stratum")
    _axes(lines, f"AP@{t:g} (%)")
    x0, x1, y0 = _ML, _W - _MR, _H - _MB
    n = max(len(rows), 1)
    slot = (x1 - x0) / n
    for i, r in enumerate(rows):
        x = x0 + i * slot + 0.15 * slot
        width = 0.7 * slot
        y = _y_pos(r.ap_percent[threshold_index])
        label = r.stratum if r.corruption == "none" else f"{r.corruption}:{r.stratum}"
        if r.severity is not None:
            label += f"@S{r.severity}"
        color = _PALETTE[i % len(_PALETTE)]
        lines.append(
            f'<rect class="bar" x="{x:.1f}" y="{y:.1f}" width="{width:.1f}" '
            f'height="{y0 - y:.1f}" fill="{color}"/>'
        )
        cx = x + width / 2
        lines.append(
            f'<text x="{cx:.1f}" y="{y0 + 12}" font-size="9" text-anchor="end" '
            f'transform="rotate(-45 {cx:.1f} {y0 + 12})">{_esc(label)}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_report_charts(report: EvalReport) -> dict[str, str]:
    """Every applicable chart, keyed by file stem (e.g. severity_ap0.3)."""
    charts: dict[str, str] = {}
    has_severity = any(r.stratum == "all" and r.severity is not None for r in report.rows)
    has_strata = any(r.stratum != "all" for r in report.rows)
    for i, t in enumerate(report.iou_thresholds):
        tag = f"ap{t:g}".replace(".", "_")
        if has_severity:
            charts[f"severity_{tag}"] = severity_chart(report, i)
        if has_strata:
            charts[f"strata_{tag}"] = strata_chart(report, i)
    return charts
