"""JSON box files and Table-style CSV export.

Three JSON layouts are accepted::

    {"format": "full", "probabilities": [[...], [...], [...], [...]]}
    {"format": "ns_params", "m1": ..., "m2": ..., "n1": ..., "n2": ..., "c": [c1, c2, c3, c4]}
    {"format": "equal_bias", "p": ..., "c": [c1, c2, c3, c4]}

Rows are always in setting order xy = 00, 01, 10, 11.  A document holding an
``"extremal_box"`` key (an optimizer result) is unwrapped transparently.
"""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

from .box import (
    DEFAULT_TOLERANCE,
    OUTCOMES,
    SETTINGS,
    CorrelationBox,
    EqualBiasBox,
    NsParams,
    box_from_equal_bias,
    box_from_ns_params,
)

FORMATS = ("full", "ns_params", "equal_bias")
BUNDLED = ("quantum", "pr", "uniform")


class BoxFileError(ValueError):
    """The document is not a well-formed box description."""


def _number(doc: dict, key: str) -> float:
    if key not in doc:
        raise BoxFileError(f"missing field {key!r}")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise BoxFileError(f"field {key!r} must be a number, got {v!r}")
    return float(v)


def _c_list(doc: dict) -> list[float]:
    c = doc.get("c")
    if not isinstance(c, list) or len(c) != 4:
        raise BoxFileError("field 'c' must be a list of four numbers [c1, c2, c3, c4]")
    for i, v in enumerate(c):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise BoxFileError(f"field 'c[{i}]' must be a number, got {v!r}")
    return [float(v) for v in c]


def parse_params(doc: dict) -> EqualBiasBox | NsParams | list[list[float]]:
    """Turn a JSON document into parameters without validating probabilities."""
    if not isinstance(doc, dict):
        raise BoxFileError("box document must be a JSON object")
    if "extremal_box" in doc and "format" not in doc:
        return parse_params(doc["extremal_box"])
    fmt = doc.get("format")
    if fmt == "full":
        rows = doc.get("probabilities")
        if not (isinstance(rows, list) and len(rows) == 4 and all(isinstance(r, list) and len(r) == 4 for r in rows)):
            raise BoxFileError("field 'probabilities' must be a 4x4 list of numbers")
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise BoxFileError(f"field 'probabilities[{i}][{j}]' must be a number, got {v!r}")
        return [[float(v) for v in r] for r in rows]
    if fmt == "ns_params":
        c1, c2, c3, c4 = _c_list(doc)
        return NsParams(_number(doc, "m1"), _number(doc, "m2"), _number(doc, "n1"), _number(doc, "n2"), c1, c2, c3, c4)
    if fmt == "equal_bias":
        return EqualBiasBox.from_c(_number(doc, "p"), _c_list(doc))
    raise BoxFileError(f"field 'format' must be one of {', '.join(FORMATS)}; got {fmt!r}")


def box_from_document(doc: dict, tolerance: float = DEFAULT_TOLERANCE) -> CorrelationBox:
    """Build and fully validate (including no-signaling) a box from a parsed document."""
    params = parse_params(doc)
    if isinstance(params, EqualBiasBox):
        box = box_from_equal_bias(params, tolerance)
    elif isinstance(params, NsParams):
        box = box_from_ns_params(params, tolerance)
    else:
        box = CorrelationBox.from_rows(params, tolerance)
    return box.validate()


def load_box(path, tolerance: float = DEFAULT_TOLERANCE) -> CorrelationBox:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise BoxFileError(f"{path}: not valid JSON ({exc})") from exc
    return box_from_document(doc, tolerance)


def box_document(box: CorrelationBox) -> dict:
    return {"format": "full", "probabilities": box.rows().tolist()}


def equal_bias_document(eb: EqualBiasBox) -> dict:
    return {"format": "equal_bias", "p": eb.p, "c": list(eb.c)}


def dump_box(box: CorrelationBox | EqualBiasBox, path) -> None:
    doc = equal_bias_document(box) if isinstance(box, EqualBiasBox) else box_document(box)
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def bundled_path(name: str) -> Path:
    """Path of a shipped fixture: ``quantum``, ``pr`` or ``uniform``."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled box {name!r}; choose from {BUNDLED}")
    return Path(str(resources.files("nonlocalbox") / "data" / f"{name}.json"))


def format_table(box: CorrelationBox, decimals: int = 6) -> str:
    header = "xy\\ab " + " ".join(f"{a}{b}".rjust(decimals + 3) for a, b in OUTCOMES)
    lines = [header]
    for x, y in SETTINGS:
        cells = " ".join(f"{box.prob[x, y, a, b]:.{decimals}f}".rjust(decimals + 3) for a, b in OUTCOMES)
        lines.append(f"{x}{y}    " + " " + cells)
    return "\n".join(lines)


def write_table_csv(box: CorrelationBox, path, decimals: int = 6) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xy\\ab"] + [f"{a}{b}" for a, b in OUTCOMES])
        for x, y in SETTINGS:
            w.writerow([f"{x}{y}"] + [f"{box.prob[x, y, a, b]:.{decimals}f}" for a, b in OUTCOMES])


def read_table_csv(path) -> list[list[float]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return [[float(v) for v in r[1:]] for r in rows[1:]]
