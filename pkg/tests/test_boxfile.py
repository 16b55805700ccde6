import json

import numpy as np
import pytest

from nonlocalbox.box import EqualBiasBox, box_from_equal_bias, pr_box, quantum_tsirelson_box, uniform_box
from nonlocalbox.boxfile import (
    BoxFileError,
    box_from_document,
    bundled_path,
    dump_box,
    format_table,
    load_box,
    read_table_csv,
    write_table_csv,
)
from nonlocalbox.errors import NormalizationViolation, PositivityViolation, SignalingViolation


@pytest.mark.parametrize("name, factory", [("quantum", quantum_tsirelson_box), ("pr", pr_box), ("uniform", uniform_box)])
def test_bundled_fixtures(name, factory):
    assert load_box(bundled_path(name)) == factory()


def test_unknown_bundled():
    with pytest.raises(KeyError):
        bundled_path("nope")


def test_three_formats_agree():
    p, c = 0.6, [0.4, 0.35, 0.35, 0.3]
    docs = [
        {"format": "equal_bias", "p": p, "c": c},
        {"format": "ns_params", "m1": p, "m2": p, "n1": p, "n2": p, "c": c},
        {"format": "full", "probabilities": box_from_equal_bias(EqualBiasBox.from_c(p, c)).rows().tolist()},
    ]
    boxes = [box_from_document(d) for d in docs]
    assert boxes[0] == boxes[1]
    np.testing.assert_allclose(boxes[0].prob, boxes[2].prob, atol=1e-15)


def test_result_document_is_unwrapped():
    doc = {"criterion": "IC", "extremal_box": {"format": "equal_bias", "p": 0.5, "c": [0.5, 0.5, 0.5, 0.0]}}
    assert box_from_document(doc) == pr_box()


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"format": "equal_bias", "c": [0.1] * 4}, "'p'"),
        ({"format": "equal_bias", "p": "half", "c": [0.1] * 4}, "'p'"),
        ({"format": "equal_bias", "p": 0.5, "c": [0.1] * 3}, "'c'"),
        ({"format": "equal_bias", "p": 0.5, "c": [0.1, 0.1, None, 0.1]}, r"c\[2\]"),
        ({"format": "ns_params", "m1": 0.5, "m2": 0.5, "n1": 0.5, "c": [0.25] * 4}, "'n2'"),
        ({"format": "full", "probabilities": [[0.25] * 4] * 3}, "'probabilities'"),
        ({"format": "full", "probabilities": [[0.25] * 4] * 3 + [[0.25, 0.25, True, 0.25]]}, r"probabilities\[3\]\[2\]"),
        ({"format": "table"}, "'format'"),
        ([1, 2], "JSON object"),
    ],
)
def test_malformed_documents_name_the_field(doc, field):
    with pytest.raises(BoxFileError, match=field):
        box_from_document(doc)


def test_validation_errors():
    rows = np.full((4, 4), 0.25)
    rows[1] = [0.3, 0.3, 0.3, 0.2]
    with pytest.raises(NormalizationViolation):
        box_from_document({"format": "full", "probabilities": rows.tolist()})
    with pytest.raises(PositivityViolation):
        box_from_document({"format": "equal_bias", "p": 0.5, "c": [0.5, 0.5, 0.5, 0.6]})
    rows = np.full((4, 4), 0.25)
    rows[0] = [0.35, 0.25, 0.15, 0.25]
    with pytest.raises(SignalingViolation):
        box_from_document({"format": "full", "probabilities": rows.tolist()})


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(BoxFileError, match="not valid JSON"):
        load_box(path)


def test_dump_round_trip(tmp_path, quantum):
    path = tmp_path / "q.json"
    dump_box(quantum, path)
    assert json.loads(path.read_text())["format"] == "full"
    assert load_box(path) == quantum
    eb = EqualBiasBox(0.7, 0.5, 0.6, 0.6, 0.45)
    dump_box(eb, path)
    assert load_box(path) == box_from_equal_bias(eb)


def test_table_csv(tmp_path, quantum):
    path = tmp_path / "t.csv"
    write_table_csv(quantum, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "xy\\ab,00,01,10,11"
    assert lines[1] == "00,0.426777,0.073223,0.073223,0.426777"
    np.testing.assert_allclose(read_table_csv(path), quantum.rows(), atol=5e-7)


def test_format_table(pr):
    text = format_table(pr, decimals=3)
    assert text.splitlines()[4].split()[1:] == ["0.000", "0.500", "0.500", "0.000"]
