"""Minimal deterministic SVG plot writer.

Each panel is emitted as a <g class="panel"> whose data- attributes
record the pixel box and the data limits/scales, so the exact affine
(or log-affine) transform is invertible from the file alone.  Data
points are <circle class="data"> with full-precision coordinates;
connecting lines are <polyline class="data-line">; slope guides are
<line class="guide" data-slope="...">.  Rendering the same input twice
yields the same bytes.
"""

import math
from dataclasses import dataclass, field

PANEL_W = 320.0
PANEL_H = 240.0
MARGIN = 70.0
GAP = 50.0

STYLES = {
    # caption convention: solid cyan = real channel, dashed orange = imaginary
    "real": {"stroke": "#00b0c8", "dash": None},
    "imag": {"stroke": "#e8820c", "dash": "6,4"},
    "default": {"stroke": "#1f4e9c", "dash": None},
}
# cycled for per-level series
LEVEL_COLORS = ("#1f4e9c", "#c03028", "#2c8c3c", "#8c2cb0",
                "#b08c00", "#00787c", "#783c14", "#505050")


def fmt(v):
    """Full-precision, locale-independent number formatting."""
    return f"{float(v):.17g}"


def _esc(s):
    return (str(s).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


@dataclass
class Series:
    label: str
    points: list          # (x, y) floats
    style: str = "default"
    color: str | None = None


@dataclass
class Panel:
    title: str = ""
    xscale: str = "log"   # "log" | "linear"
    yscale: str = "log"
    xlabel: str = ""
    ylabel: str = ""
    series: list = field(default_factory=list)
    guides: list = field(default_factory=list)  # (slope, intercept|None)

    def limits(self):
        xs = [p[0] for s in self.series for p in s.points]
        ys = [p[1] for s in self.series for p in s.points]
        if not xs:
            raise ValueError(f"panel {self.title!r} has no data points")
        return (_axis_limits(xs, self.xscale),
                _axis_limits(ys, self.yscale))


def _axis_limits(values, scale):
    lo, hi = min(values), max(values)
    if scale == "log":
        if lo <= 0:
            raise ValueError("log axis requires strictly positive data")
        a = math.floor(math.log10(lo))
        b = math.ceil(math.log10(hi))
        if a == b:
            b = a + 1
        return 10.0 ** a, 10.0 ** b
    span = hi - lo
    if span == 0:
        return lo - 1.0, hi + 1.0
    return lo - 0.05 * span, hi + 0.05 * span


def _coord(v, lo, hi, scale):
    """Fractional position of v on the [lo, hi] axis."""
    if scale == "log":
        return (math.log10(v) - math.log10(lo)) / (
            math.log10(hi) - math.log10(lo))
    return (v - lo) / (hi - lo)


def _ticks(lo, hi, scale):
    if scale == "log":
        a = math.ceil(math.log10(lo) - 1e-12)
        b = math.floor(math.log10(hi) + 1e-12)
        step = max(1, (b - a) // 6)
        return [10.0 ** k for k in range(a, b + 1, step)]
    n = 5
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _tick_label(v, scale):
    if scale == "log":
        return f"1e{int(round(math.log10(v)))}"
    return f"{v:.3g}"


def _panel_svg(panel, x0, y0, index):
    (xlo, xhi), (ylo, yhi) = panel.limits()

    def px(v):
        return x0 + _coord(v, xlo, xhi, panel.xscale) * PANEL_W

    def py(v):
        return y0 + PANEL_H - _coord(v, ylo, yhi, panel.yscale) * PANEL_H

    parts = [
        f'<g class="panel" data-panel="{index}" '
        f'data-x0="{fmt(x0)}" data-y0="{fmt(y0)}" '
        f'data-w="{fmt(PANEL_W)}" data-h="{fmt(PANEL_H)}" '
        f'data-xmin="{fmt(xlo)}" data-xmax="{fmt(xhi)}" '
        f'data-ymin="{fmt(ylo)}" data-ymax="{fmt(yhi)}" '
        f'data-xscale="{panel.xscale}" data-yscale="{panel.yscale}">',
        f'<rect x="{fmt(x0)}" y="{fmt(y0)}" width="{fmt(PANEL_W)}" '
        f'height="{fmt(PANEL_H)}" fill="white" stroke="black"/>',
    ]
    if panel.title:
        parts.append(
            f'<text x="{fmt(x0 + PANEL_W / 2)}" y="{fmt(y0 - 8)}" '
            f'text-anchor="middle" font-size="13">{_esc(panel.title)}</text>')
    for t in _ticks(xlo, xhi, panel.xscale):
        X = px(t)
        parts.append(
            f'<line x1="{fmt(X)}" y1="{fmt(y0 + PANEL_H)}" '
            f'x2="{fmt(X)}" y2="{fmt(y0 + PANEL_H + 5)}" stroke="black"/>')
        parts.append(
            f'<text x="{fmt(X)}" y="{fmt(y0 + PANEL_H + 18)}" '
            f'text-anchor="middle" font-size="10">'
            f'{_esc(_tick_label(t, panel.xscale))}</text>')
    for t in _ticks(ylo, yhi, panel.yscale):
        Y = py(t)
        parts.append(
            f'<line x1="{fmt(x0 - 5)}" y1="{fmt(Y)}" '
            f'x2="{fmt(x0)}" y2="{fmt(Y)}" stroke="black"/>')
        parts.append(
            f'<text x="{fmt(x0 - 8)}" y="{fmt(Y + 3)}" '
            f'text-anchor="end" font-size="10">'
            f'{_esc(_tick_label(t, panel.yscale))}</text>')
    if panel.xlabel:
        parts.append(
            f'<text x="{fmt(x0 + PANEL_W / 2)}" y="{fmt(y0 + PANEL_H + 36)}" '
            f'text-anchor="middle" font-size="12">{_esc(panel.xlabel)}</text>')
    if panel.ylabel:
        cx, cy = x0 - 44, y0 + PANEL_H / 2
        parts.append(
            f'<text x="{fmt(cx)}" y="{fmt(cy)}" text-anchor="middle" '
            f'font-size="12" transform="rotate(-90 {fmt(cx)} {fmt(cy)})">'
            f'{_esc(panel.ylabel)}</text>')

    for s in panel.series:
        style = STYLES.get(s.style, STYLES["default"])
        color = s.color or style["stroke"]
        dash = f' stroke-dasharray="{style["dash"]}"' if style["dash"] else ""
        coords = " ".join(f"{fmt(px(x))},{fmt(py(y))}" for x, y in s.points)
        parts.append(
            f'<g class="series" data-label="{_esc(s.label)}" '
            f'data-style="{s.style}">')
        parts.append(
            f'<polyline class="data-line" points="{coords}" fill="none" '
            f'stroke="{color}" stroke-width="1.5"{dash}/>')
        for x, y in s.points:
            parts.append(
                f'<circle class="data" cx="{fmt(px(x))}" cy="{fmt(py(y))}" '
                f'r="2.5" fill="{color}"/>')
        parts.append("</g>")

    for slope, intercept in panel.guides:
        seg = _guide_segment(panel, slope, intercept, xlo, xhi, ylo, yhi)
        if seg is None:
            continue
        (gx1, gy1), (gx2, gy2) = seg
        parts.append(
            f'<line class="guide" data-slope="{fmt(slope)}" '
            f'x1="{fmt(px(gx1))}" y1="{fmt(py(gy1))}" '
            f'x2="{fmt(px(gx2))}" y2="{fmt(py(gy2))}" '
            f'stroke="black" stroke-width="1"/>')
    parts.append("</g>")
    return parts


def _guide_segment(panel, slope, intercept, xlo, xhi, ylo, yhi):
    """Endpoints of the guide y = f(x) clipped to the panel limits.

    In log-log panels the guide is log10 y = intercept + slope*log10 x;
    on linear panels it is y = intercept + slope*x.  A missing intercept
    anchors the line through the middle point of the panel's first
    series.
    """
    log_panel = panel.xscale == "log" and panel.yscale == "log"

    def tx(x):
        return math.log10(x) if log_panel else x

    def ty(y):
        return math.log10(y) if log_panel else y

    def inv_y(Y):
        return 10.0 ** Y if log_panel else Y

    def inv_x(X):
        return 10.0 ** X if log_panel else X

    if intercept is None:
        pts = panel.series[0].points
        mx, my = pts[len(pts) // 2]
        intercept = ty(my) - slope * tx(mx)
    X1, X2 = tx(xlo), tx(xhi)
    Ylo, Yhi = ty(ylo), ty(yhi)
    if slope != 0:
        # restrict X so that Y stays inside the panel
        xa = (Ylo - intercept) / slope
        xb = (Yhi - intercept) / slope
        X1 = max(X1, min(xa, xb))
        X2 = min(X2, max(xa, xb))
    if X1 >= X2:
        return None
    return ((inv_x(X1), inv_y(intercept + slope * X1)),
            (inv_x(X2), inv_y(intercept + slope * X2)))


def render_svg(panels, ncols=2):
    """Compose panels into one SVG document string."""
    if not panels:
        raise ValueError("no panels to render")
    ncols = min(ncols, len(panels))
    nrows = (len(panels) + ncols - 1) // ncols
    width = MARGIN * 2 + ncols * PANEL_W + (ncols - 1) * GAP
    height = MARGIN * 2 + nrows * PANEL_H + (nrows - 1) * GAP
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt(width)}" height="{fmt(height)}" '
        f'viewBox="0 0 {fmt(width)} {fmt(height)}">',
        f'<rect x="0" y="0" width="{fmt(width)}" height="{fmt(height)}" '
        f'fill="white"/>',
    ]
    for k, panel in enumerate(panels):
        row, col = divmod(k, ncols)
        x0 = MARGIN + col * (PANEL_W + GAP)
        y0 = MARGIN + row * (PANEL_H + GAP)
        parts.extend(_panel_svg(panel, x0, y0, k))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
