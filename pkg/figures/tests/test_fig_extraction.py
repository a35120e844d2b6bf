"""Round-trip fidelity: every plotted point must decode back to the
exact value in the source CSV, and slope guides must carry the fitted
slopes."""

import json
import math
import xml.etree.ElementTree as ET

import pytest

from susyep_figures.cli import main as render_main

SVG = "{http://www.w3.org/2000/svg}"


def fmt(x):
    return f"{x:.17e}"


def decode_panel(g):
    """Inverse coordinate transform published in the panel attributes."""
    x0 = float(g.get("data-x0"))
    y0 = float(g.get("data-y0"))
    w = float(g.get("data-w"))
    h = float(g.get("data-h"))
    xmin, xmax = float(g.get("data-xmin")), float(g.get("data-xmax"))
    ymin, ymax = float(g.get("data-ymin")), float(g.get("data-ymax"))
    xlog = g.get("data-xscale") == "log"
    ylog = g.get("data-yscale") == "log"

    def inv_x(px):
        u = (px - x0) / w
        if xlog:
            return 10.0 ** (math.log10(xmin)
                            + u * (math.log10(xmax) - math.log10(xmin)))
        return xmin + u * (xmax - xmin)

    def inv_y(py):
        v = (y0 + h - py) / h
        if ylog:
            return 10.0 ** (math.log10(ymin)
                            + v * (math.log10(ymax) - math.log10(ymin)))
        return ymin + v * (ymax - ymin)

    return inv_x, inv_y


def panels_of(svg_path):
    root = ET.parse(svg_path).getroot()
    return [g for g in root.iter(f"{SVG}g") if g.get("class") == "panel"]


def series_points(panel, inv_x, inv_y):
    """label -> ordered list of decoded (x, y) data points."""
    out = {}
    for s in panel.iter(f"{SVG}g"):
        if s.get("class") != "series":
            continue
        pts = [(inv_x(float(c.get("cx"))), inv_y(float(c.get("cy"))))
               for c in s.iter(f"{SVG}circle") if c.get("class") == "data"]
        out[s.get("data-label")] = (s.get("data-style"), pts)
    return out


def guide_slopes(panel, inv_x, inv_y, log_panel=True):
    slopes = []
    for line in panel.iter(f"{SVG}line"):
        if line.get("class") != "guide":
            continue
        x1 = inv_x(float(line.get("x1")))
        x2 = inv_x(float(line.get("x2")))
        y1 = inv_y(float(line.get("y1")))
        y2 = inv_y(float(line.get("y2")))
        if log_panel:
            measured = (math.log10(y2) - math.log10(y1)) / (
                math.log10(x2) - math.log10(x1))
        else:
            measured = (y2 - y1) / (x2 - x1)
        slopes.append((float(line.get("data-slope")), measured))
    return slopes


def write_rigidity(path, slope, coeff, levels=3, npts=13):
    rows = ["control,level,abs_r"]
    for k in range(npts):
        d = 10.0 ** (-6 + 3 * k / (npts - 1))
        for lvl in range(levels):
            rows.append(f"{fmt(d)},{lvl},{fmt((coeff + lvl) * d ** slope)}")
    path.write_text("\n".join(rows) + "\n")


def write_fits(path, quantity, slope, intercept):
    path.write_text(
        "quantity,slope,intercept,r_squared,window_min,window_max\n"
        f"{quantity},{fmt(slope)},{fmt(intercept)},{fmt(1.0)},"
        f"{fmt(1e-6)},{fmt(1e-3)}\n")


def write_splitting(path, order, c_re, c_im, npts=17):
    rows = ["epsilon,pair_a,pair_b,split_re,split_im"]
    for k in range(npts):
        e = 10.0 ** (-12 + 8 * k / (npts - 1))
        rows.append(f"{fmt(e)},0,5,{fmt(c_re * e ** order)},"
                    f"{fmt(c_im * e ** order)}")
    path.write_text("\n".join(rows) + "\n")


def render_spec(tmp_path, spec_dict):
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(json.dumps(spec_dict))
    assert render_main(["--spec", str(spec_path)]) == 0
    return spec_dict["output"]


def test_fig2_points_match_source_csvs(tmp_path):
    inputs = []
    truth = {}
    for i, (N, slope) in enumerate([(3, 1.0), (4, 1.5), (5, 2.0), (6, 2.5)]):
        csv_path = tmp_path / f"rigidity_n{N}.csv"
        write_rigidity(csv_path, slope, coeff=2.0, levels=N)
        inputs.append({"path": str(csv_path), "label": f"N={N}"})
        truth[i] = (N, slope)
    out = str(tmp_path / "fig2.svg")
    render_spec(tmp_path, {
        "figure_id": "fig2",
        "input_csvs": inputs,
        "output": out,
        "annotations": [
            {"panel": i, "slope": truth[i][1]} for i in truth
        ],
    })
    panels = panels_of(out)
    assert len(panels) == 4
    for i, panel in enumerate(panels):
        N, slope = truth[i]
        inv_x, inv_y = decode_panel(panel)
        series = series_points(panel, inv_x, inv_y)
        assert set(series) == {f"level {lvl}" for lvl in range(N)}
        for lvl in range(N):
            _, pts = series[f"level {lvl}"]
            assert len(pts) == 13
            for k, (x, y) in enumerate(pts):
                d = 10.0 ** (-6 + 3 * k / 12)
                assert x == pytest.approx(d, rel=1e-9)
                assert y == pytest.approx((2.0 + lvl) * d ** slope, rel=1e-9)
        guides = guide_slopes(panel, inv_x, inv_y)
        assert len(guides) == 1
        declared, measured = guides[0]
        assert declared == slope
        assert measured == pytest.approx(slope, rel=1e-9)


def test_fig3_points_match_source_csv_and_channels_distinct(tmp_path):
    csv_path = tmp_path / "splitting.csv"
    write_splitting(csv_path, order=1.0 / 6.0, c_re=3.0, c_im=1.5)
    fits_path = tmp_path / "fits.csv"
    write_fits(fits_path, "split_re", 1.0 / 6.0, math.log10(3.0))
    out = str(tmp_path / "fig3.svg")
    render_spec(tmp_path, {
        "figure_id": "fig3",
        "input_csvs": [{"path": str(csv_path), "label": "N=6 uniform"}],
        "output": out,
        "annotations": [{"panel": 0, "fits_path": str(fits_path),
                         "quantity": "split_re"}],
    })
    panels = panels_of(out)
    assert len(panels) == 1
    inv_x, inv_y = decode_panel(panels[0])
    series = series_points(panels[0], inv_x, inv_y)
    assert set(series) == {"|Re splitting|", "|Im splitting|"}
    for label, coeff in (("|Re splitting|", 3.0), ("|Im splitting|", 1.5)):
        style, pts = series[label]
        assert len(pts) == 17
        for k, (x, y) in enumerate(pts):
            e = 10.0 ** (-12 + 8 * k / 16)
            assert x == pytest.approx(e, rel=1e-9)
            assert y == pytest.approx(coeff * e ** (1.0 / 6.0), rel=1e-9)
    assert series["|Re splitting|"][0] == "real"
    assert series["|Im splitting|"][0] == "imag"
    # visual distinction: different stroke colors, dashed imaginary line
    root = ET.parse(out).getroot()
    strokes = {}
    for s in root.iter(f"{SVG}g"):
        if s.get("class") == "series":
            line = next(el for el in s.iter(f"{SVG}polyline"))
            strokes[s.get("data-label")] = (
                line.get("stroke"), line.get("stroke-dasharray"))
    assert strokes["|Re splitting|"][0] != strokes["|Im splitting|"][0]
    assert strokes["|Re splitting|"][1] is None
    assert strokes["|Im splitting|"][1] is not None
    # fitted guide decodes to the fitted slope and intercept
    guides = guide_slopes(panels[0], inv_x, inv_y)
    assert len(guides) == 1
    declared, measured = guides[0]
    assert declared == pytest.approx(1.0 / 6.0)
    assert measured == pytest.approx(1.0 / 6.0, rel=1e-9)


def test_fig2_from_live_pipeline(tmp_path):
    """End-to-end: rigidity CSVs produced by the analysis CLI decode
    back out of the rendered SVG unchanged."""
    susyep_cli = pytest.importorskip("susyep.cli")
    run_dir = tmp_path / "run"
    assert susyep_cli.main([
        "rigidity-sweep", "-N", "3", "--control", "gamma",
        "--min", "1e-6", "--max", "1e-3", "--count", "9",
        "--out", str(run_dir)]) == 0
    out = str(tmp_path / "fig2.svg")
    render_spec(tmp_path, {
        "figure_id": "fig2",
        "input_csvs": [{"path": str(run_dir / "rigidity.csv"),
                        "label": "N=3"}],
        "output": out,
        "annotations": [{"panel": 0, "fits_path": str(run_dir / "fits.csv"),
                         "quantity": "rigidity_level_0"}],
    })
    import csv as csvmod
    with open(run_dir / "rigidity.csv", newline="") as fh:
        rows = list(csvmod.DictReader(fh))
    panel = panels_of(out)[0]
    inv_x, inv_y = decode_panel(panel)
    series = series_points(panel, inv_x, inv_y)
    for lvl in range(3):
        _, pts = series[f"level {lvl}"]
        src = [(float(r["control"]), float(r["abs_r"]))
               for r in rows if int(r["level"]) == lvl]
        src.sort(key=lambda p: p[0])
        assert len(pts) == len(src)
        for (x, y), (sx, sy) in zip(pts, src):
            assert x == pytest.approx(sx, rel=1e-9)
            assert y == pytest.approx(sy, rel=1e-9)
