"""Figure specification: which CSVs feed which layout, and the guide
lines to annotate.

A spec is a JSON object:

    {
      "figure_id": "fig2",
      "input_csvs": [{"path": "runs/n3/rigidity.csv", "label": "N=3"}, ...],
      "output": "fig2.svg",
      "annotations": [
        {"panel": 0, "slope": 1.0},
        {"panel": 1, "fits_path": "runs/n4/fits.csv",
         "quantity": "rigidity_level_0"}
      ]
    }

Each input's table kind is implied by the figure family and may be
overridden per input with a "kind" key.
"""

import json
from dataclasses import dataclass
from pathlib import Path

VALID_FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

# table kind each figure family consumes by default
KIND_FOR_FIGURE = {
    "fig2": "rigidity",
    "fig3": "splitting",
    "fig4": "spectrum",
    "fig5": "splitting",
    "fig6": "splitting",
    "fig7": "splitting",
}


class FigureSpecError(ValueError):
    """Malformed figure specification."""


@dataclass(frozen=True)
class InputCsv:
    path: str
    kind: str
    label: str = ""


@dataclass(frozen=True)
class GuideLine:
    """A slope guide on one panel.

    Either `slope` (with optional `intercept`, both in log10 units for
    log-log panels) is given directly, or (`fits_path`, `quantity`)
    points at a row of a fits-schema CSV to take slope and intercept
    from.
    """

    panel: int
    slope: float | None = None
    intercept: float | None = None
    fits_path: str | None = None
    quantity: str | None = None


@dataclass(frozen=True)
class FigureSpec:
    figure_id: str
    input_csvs: tuple
    output: str
    annotations: tuple = ()

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise FigureSpecError("figure spec must be a JSON object")
        unknown = set(d) - {"figure_id", "input_csvs", "output", "annotations"}
        if unknown:
            raise FigureSpecError(f"unknown spec keys: {sorted(unknown)}")
        fig = d.get("figure_id")
        if fig not in VALID_FIGURES:
            raise FigureSpecError(
                f"figure_id must be one of {VALID_FIGURES}, got {fig!r}")
        raw_inputs = d.get("input_csvs")
        if not raw_inputs or not isinstance(raw_inputs, list):
            raise FigureSpecError("input_csvs must be a non-empty list")
        inputs = []
        for item in raw_inputs:
            if isinstance(item, str):
                item = {"path": item}
            if not isinstance(item, dict) or "path" not in item:
                raise FigureSpecError(
                    f"each input must be a path or an object with 'path', "
                    f"got {item!r}")
            inputs.append(InputCsv(
                path=str(item["path"]),
                kind=str(item.get("kind", KIND_FOR_FIGURE[fig])),
                label=str(item.get("label", "")),
            ))
        output = d.get("output")
        if not output:
            raise FigureSpecError("output path is required")
        guides = []
        for item in d.get("annotations", []):
            if not isinstance(item, dict) or "panel" not in item:
                raise FigureSpecError(
                    f"each annotation needs a 'panel' index, got {item!r}")
            has_slope = "slope" in item
            has_fits = "fits_path" in item and "quantity" in item
            if not (has_slope or has_fits):
                raise FigureSpecError(
                    "annotation needs either 'slope' or "
                    "'fits_path'+'quantity'")
            guides.append(GuideLine(
                panel=int(item["panel"]),
                slope=float(item["slope"]) if has_slope else None,
                intercept=(float(item["intercept"])
                           if "intercept" in item else None),
                fits_path=item.get("fits_path"),
                quantity=item.get("quantity"),
            ))
        return cls(figure_id=fig, input_csvs=tuple(inputs),
                   output=str(output), annotations=tuple(guides))

    @classmethod
    def from_json_file(cls, path):
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise FigureSpecError(f"cannot read spec {path}: {exc}") from exc
        return cls.from_dict(d)
