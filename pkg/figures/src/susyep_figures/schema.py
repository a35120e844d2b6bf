"""Validation of the published CSV table schemas.

The upstream command line pins these headers bit-exactly; any deviation
is rejected here with the offending column named, so a renderer never
silently plots the wrong quantity.
"""

import csv
from pathlib import Path

CSV_SCHEMAS = {
    "spectrum": ("gamma", "level", "re_omega", "im_omega"),
    "rigidity": ("control", "level", "abs_r"),
    "splitting": ("epsilon", "pair_a", "pair_b", "split_re", "split_im"),
    "fits": ("quantity", "slope", "intercept", "r_squared",
             "window_min", "window_max"),
}


class SchemaError(ValueError):
    """A CSV input does not match its published schema."""


def read_table(path, kind):
    """Read and validate a CSV against the named schema.

    Returns a list of row dicts keyed by the schema's column names.
    Raises SchemaError naming the offending header on any mismatch.
    """
    if kind not in CSV_SCHEMAS:
        raise SchemaError(f"unknown table kind {kind!r}; "
                          f"expected one of {sorted(CSV_SCHEMAS)}")
    expected = CSV_SCHEMAS[kind]
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"{path}: file does not exist")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(
            f"{path}: empty CSV, expected header "
            f"'{','.join(expected)}'")
    header = tuple(rows[0])
    for i, name in enumerate(expected):
        if i >= len(header):
            raise SchemaError(
                f"{path}: missing column {i + 1}, expected header '{name}'")
        if header[i] != name:
            raise SchemaError(
                f"{path}: column {i + 1} must be '{name}', "
                f"found '{header[i]}'")
    if len(header) > len(expected):
        raise SchemaError(
            f"{path}: unexpected extra column '{header[len(expected)]}'")
    if len(rows) == 1:
        raise SchemaError(f"{path}: header only, no data rows")
    out = []
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(expected):
            raise SchemaError(
                f"{path}: line {k} has {len(row)} fields, "
                f"expected {len(expected)}")
        out.append(dict(zip(expected, row)))
    return out
