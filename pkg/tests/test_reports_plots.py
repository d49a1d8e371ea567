import json
import math
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zll.oscillation import build_partition
from zll.plots import emit_plot
from zll.reports import FunctionalReport, emit_report

SCHEMA = {"name", "constants", "grid", "values", "target", "residuals", "resolution_achieved", "cache_fingerprint"}


def _report(values=(1.1, 0.95, 1.02)):
    return FunctionalReport(
        name="scaled",
        grid=[2500.0, 5000.0, 10000.0][: len(values)],
        values=list(values),
        target=1.0,
        constants={"c": 0.5772156649015329, "c0": 3.1415913040882066},
        resolution_achieved=0.02,
        cache_fingerprint="0123456789abcdef",
    )


def test_json_schema_and_determinism(tmp_path):
    rep = _report()
    text = emit_report(rep, "json", tmp_path / "r.json")
    assert text == emit_report(_report(), "json")
    assert (tmp_path / "r.json").read_text() == text
    data = json.loads(text)
    assert SCHEMA <= set(data)
    assert data["residuals"] == pytest.approx([0.1, -0.05, 0.02])
    assert set(data["constants"]) == {"c", "c0"}


def test_csv_layout():
    lines = emit_report(_report(), "csv").splitlines()
    assert lines[0] == "param,value,target,residual"
    assert lines[1].split(",")[:3] == ["2500", "1.1000000000000001", "1"]
    assert emit_report(_report(()), "csv") == "param,value,target,residual\n"


@settings(max_examples=100)
@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=1, max_size=3))
def test_json_round_trip_17_digits(values):
    data = json.loads(emit_report(_report(values), "json"))
    assert data["values"] == [float(f"{v:.17g}") for v in values]
    assert data["values"] == values


def test_report_validation():
    with pytest.raises(ValueError):
        FunctionalReport("x", [2.0, 1.0], [0.0, 0.0], 0.0, {}, None, "")
    with pytest.raises(ValueError):
        FunctionalReport("x", [1.0], [math.nan], 0.0, {}, None, "")
    with pytest.raises(ValueError):
        emit_report(_report(), "xml")


def test_per_point_targets_and_trend():
    rep = FunctionalReport("localized", [0.9, 1.1], [0.91, 1.08], 1.0, {}, None, "", targets=[0.9, 1.1])
    assert rep.residuals == pytest.approx([0.01, -0.02])
    assert not rep.residuals_non_increasing()
    assert _report((1.1, 0.95, 1.02)).residuals_non_increasing()


def test_report_write_error_has_path(tmp_path):
    missing = tmp_path / "nope" / "r.json"
    with pytest.raises(OSError, match="nope"):
        emit_report(_report(), "json", missing)


def _svg_root(path):
    root = ET.parse(path).getroot()
    assert root.tag.endswith("svg")
    return root


def test_empty_report_plot(tmp_path):
    path = tmp_path / "empty.svg"
    emit_plot(_report(()), path)
    _svg_root(path)


def test_partition_plot(tmp_path):
    part = build_partition(50.0)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(part, a)
    emit_plot(part, b)
    assert a.read_bytes() == b.read_bytes()
    ids = [el.get("id") for el in _svg_root(a).iter() if (el.get("id") or "").startswith("segment-")]
    assert len(ids) == len(part.segments) >= 2
    assert any(i.startswith("segment-plus") for i in ids) and any(i.startswith("segment-minus") for i in ids)


def test_report_plot_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_plot(_report(), a)
    emit_plot(_report(), b)
    assert a.read_bytes() == b.read_bytes()
    with pytest.raises(TypeError):
        emit_plot(object(), a)
