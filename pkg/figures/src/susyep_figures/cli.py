"""Script entry point: render --spec <figure-spec.json>."""

import argparse
import json
import sys

from .figspec import FigureSpec, FigureSpecError
from .render import render
from .schema import SchemaError


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render deterministic SVG figures from sweep CSVs")
    parser.add_argument("--spec", required=True,
                        help="JSON figure specification")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec.from_json_file(args.spec)
        path = render(spec)
    except (FigureSpecError, SchemaError, ValueError) as exc:
        json.dump({"error": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return 2
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
