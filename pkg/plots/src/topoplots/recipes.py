"""Figure recipes: what to draw, from which artifacts, to which file."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

KINDS = ("sweep-curves", "loglog-timing", "loglog-error",
         "slice-heatmap", "slice-overlay")


class SchemaError(ValueError):
    """An input artifact is missing a required column."""

    def __init__(self, path, column):
        self.column = column
        super().__init__(f"{path}: missing column {column!r}")


@dataclass(frozen=True)
class FigureRecipe:
    kind: str
    inputs: tuple                      # artifact paths, kind-specific order
    output: str                        # image path; .png and .svg are written
    reference_coefficient: float = 0.0 # e.g. 1e-9 for the L^6 guide curve
    reference_exponent: float = 0.0
    tau: float = 1e-8                  # black threshold for overlays
    labels: tuple = ()                 # one label per sweep input

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if not self.inputs:
            raise ValueError("recipe needs at least one input artifact")
        if self.reference_exponent < 0:
            raise ValueError("reference exponent must be positive when set")

    @classmethod
    def from_json(cls, path) -> "FigureRecipe":
        data = json.loads(Path(path).read_text())
        return cls(
            kind=data["kind"],
            inputs=tuple(data["inputs"]),
            output=data["output"],
            reference_coefficient=data.get("reference_coefficient", 0.0),
            reference_exponent=data.get("reference_exponent", 0.0),
            tau=data.get("tau", 1e-8),
            labels=tuple(data.get("labels", ())),
        )


def read_csv_columns(path, required):
    """Load a CSV as {column: list(str)}; raise SchemaError naming the first
    missing column."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for column in required:
            if column not in header:
                raise SchemaError(path, column)
        rows = list(reader)
    return {column: [row[column] for row in rows] for column in header}
