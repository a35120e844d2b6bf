"""Turn a FigureSpec into panels and write the SVG."""

from pathlib import Path

from .figspec import FigureSpec, FigureSpecError
from .schema import SchemaError, read_table
from .svg import LEVEL_COLORS, Panel, Series, render_svg


def _rigidity_panel(rows, label):
    """One log-log panel, one series per level."""
    levels = sorted({int(r["level"]) for r in rows})
    series = []
    for lvl in levels:
        pts = [(float(r["control"]), float(r["abs_r"]))
               for r in rows if int(r["level"]) == lvl]
        pts.sort(key=lambda p: p[0])
        series.append(Series(label=f"level {lvl}", points=pts,
                             color=LEVEL_COLORS[lvl % len(LEVEL_COLORS)]))
    return Panel(title=label, xscale="log", yscale="log",
                 xlabel="distance to EP", ylabel="|r|", series=series)


def _splitting_panel(rows, label):
    """One log-log panel: |Re| solid cyan, |Im| dashed orange."""
    series = []
    for column, style, name in (("split_re", "real", "|Re splitting|"),
                                ("split_im", "imag", "|Im splitting|")):
        pts = [(float(r["epsilon"]), abs(float(r[column]))) for r in rows]
        pts = [p for p in pts if p[1] > 0]
        pts.sort(key=lambda p: p[0])
        if pts:
            series.append(Series(label=name, points=pts, style=style))
    if not series:
        raise SchemaError(f"splitting input {label!r} has no nonzero data")
    return Panel(title=label, xscale="log", yscale="log",
                 xlabel="epsilon", ylabel="splitting", series=series)


def _spectrum_panels(rows, label):
    """Two linear panels (real and imaginary parts vs gamma)."""
    levels = sorted({int(r["level"]) for r in rows})
    panels = []
    for column, part in (("re_omega", "Re"), ("im_omega", "Im")):
        series = []
        for lvl in levels:
            pts = [(float(r["gamma"]), float(r[column]))
                   for r in rows if int(r["level"]) == lvl]
            pts.sort(key=lambda p: p[0])
            series.append(Series(label=f"level {lvl}", points=pts,
                                 color=LEVEL_COLORS[lvl % len(LEVEL_COLORS)]))
        panels.append(Panel(
            title=f"{label} {part}".strip(), xscale="linear",
            yscale="linear", xlabel="gamma",
            ylabel=f"{part} omega", series=series))
    return panels


def _resolve_guides(spec, npanels):
    """Map annotations to (panel -> [(slope, intercept)]), reading any
    referenced fits tables."""
    out = {}
    for g in spec.annotations:
        if not 0 <= g.panel < npanels:
            raise FigureSpecError(
                f"annotation panel {g.panel} out of range "
                f"(figure has {npanels} panels)")
        slope, intercept = g.slope, g.intercept
        if slope is None:
            rows = read_table(g.fits_path, "fits")
            match = [r for r in rows if r["quantity"] == g.quantity]
            if not match:
                raise FigureSpecError(
                    f"quantity {g.quantity!r} not found in {g.fits_path}")
            slope = float(match[0]["slope"])
            intercept = float(match[0]["intercept"])
        out.setdefault(g.panel, []).append((slope, intercept))
    return out


def build_panels(spec: FigureSpec):
    panels = []
    for inp in spec.input_csvs:
        rows = read_table(inp.path, inp.kind)
        if inp.kind == "rigidity":
            panels.append(_rigidity_panel(rows, inp.label))
        elif inp.kind == "splitting":
            panels.append(_splitting_panel(rows, inp.label))
        elif inp.kind == "spectrum":
            panels.extend(_spectrum_panels(rows, inp.label))
        else:
            raise FigureSpecError(
                f"table kind {inp.kind!r} cannot be plotted directly")
    for panel_index, guides in _resolve_guides(spec, len(panels)).items():
        panels[panel_index].guides.extend(guides)
    return panels


def render(spec: FigureSpec) -> str:
    """Render the figure and return the output path."""
    panels = build_panels(spec)
    doc = render_svg(panels, ncols=2)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(doc)
    return str(out)
