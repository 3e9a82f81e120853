"""Figure specifications: what to read, what to draw, where to write.

A spec is a JSON object (or the equivalent dataclass) naming input CSVs
produced by the kgdamp CLI, a figure kind, axis scales, and the output
path.  Validation happens before any file is written: the referenced
columns must exist in the CSV headers the primary package documents.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

KINDS = (
    "energy-decay",
    "resolvent-vs-tau",
    "semiclassical-heatmap",
    "uniformity-bars",
)

# Columns each figure kind consumes, per the primary package's CSV contracts.
REQUIRED_COLUMNS = {
    "energy-decay": ("t", "E", "eta"),
    "resolvent-vs-tau": ("eta", "tau", "tau_bracket_norm", "bound_ratio"),
    "semiclassical-heatmap": ("eta", "tau", "norm"),
    "uniformity-bars": ("eta", "model", "gamma_or_c"),
}

SCALES = ("linear", "log")


class SpecError(ValueError):
    """Raised for malformed specs or CSVs missing the contracted columns."""


@dataclass(frozen=True)
class FigureSpec:
    inputs: tuple
    kind: str
    output: str
    x_scale: str = "linear"
    y_scale: str = "linear"
    title: str = ""
    overlay: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"unknown figure kind: {self.kind}")
        if not self.inputs:
            raise SpecError("spec needs at least one input CSV")
        if self.x_scale not in SCALES or self.y_scale not in SCALES:
            raise SpecError("axis scales must be 'linear' or 'log'")
        if not str(self.output).endswith((".svg", ".png")):
            raise SpecError("output must be an .svg or .png path")

    @classmethod
    def from_json(cls, obj: dict) -> "FigureSpec":
        if not isinstance(obj, dict):
            raise SpecError("spec must be a JSON object")
        try:
            inputs = obj["inputs"]
            kind = obj["kind"]
            output = obj["output"]
        except KeyError as exc:
            raise SpecError(f"spec missing required key: {exc.args[0]}") from exc
        if isinstance(inputs, str):
            inputs = [inputs]
        return cls(
            inputs=tuple(str(p) for p in inputs),
            kind=str(kind),
            output=str(output),
            x_scale=str(obj.get("x_scale", "linear")),
            y_scale=str(obj.get("y_scale", "linear")),
            title=str(obj.get("title", "")),
            overlay=dict(obj.get("overlay", {})),
        )

    @classmethod
    def from_file(cls, path: str) -> "FigureSpec":
        try:
            with open(path) as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read spec {path}: {exc}") from exc
        return cls.from_json(obj)


def load_table(path: str, required: tuple) -> dict:
    """Read a CSV into {column: list of strings}, checking the contract."""
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames
            if header is None:
                raise SpecError(f"{path}: empty CSV")
            missing = [c for c in required if c not in header]
            if missing:
                raise SpecError(f"{path}: missing columns {missing} "
                                f"(header: {header})")
            rows = list(reader)
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SpecError(f"{path}: no data rows")
    return {col: [row[col] for row in rows] for col in header}
