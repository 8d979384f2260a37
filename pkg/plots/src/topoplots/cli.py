"""topoplots command line: `topoplots render --recipe recipe.json`."""

from __future__ import annotations

import argparse
import sys

from .recipes import FigureRecipe, SchemaError
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="topoplots",
        description="Render figures from topoindex CSV/JSON artifacts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("render", help="render one figure from a recipe file")
    p.add_argument("--recipe", required=True, help="path to a recipe JSON")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0

    try:
        recipe = FigureRecipe.from_json(args.recipe)
        png, svg = render(recipe)
    except (FileNotFoundError, SchemaError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {png} and {svg}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
