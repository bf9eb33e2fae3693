import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypflow.errors import DomainError
from hypflow.flow import FlowConfig, run
from hypflow.hypgeom import sharp_constant
from hypflow.report import (
    COLUMNS,
    MonitorSeries,
    Tolerances,
    emit,
    parse_csv,
    parse_json,
    verdicts,
)
from hypflow.shapes import ShapeSpec


@pytest.fixture(scope="module")
def sphere_series():
    return run(FlowConfig(n=4, N=60, t_max=1.0, sample_interval=0.5, shape=ShapeSpec("sphere", 1.0)))


@pytest.fixture(scope="module")
def bump_series():
    return run(FlowConfig(n=5, N=80, t_max=0.2, sample_interval=0.05))


def row(t, **over):
    base = {c: 1.0 for c in COLUMNS}
    base["t"] = t
    base.update(over)
    return base


def test_csv_has_header_and_three_rows(sphere_series):
    assert len(sphere_series) == 3
    text = emit(sphere_series, "csv").decode()
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == COLUMNS and len(rows) == 4
    q = np.array([float(r[COLUMNS.index("Q")]) for r in rows[1:]])
    assert np.ptp(q) < 1e-10
    assert "\r" not in text


def test_empty_series_and_unknown_format():
    with pytest.raises(DomainError):
        emit(MonitorSeries({"n": 4}), "csv")
    with pytest.raises(DomainError):
        verdicts(MonitorSeries({"n": 4}))
    s = MonitorSeries({"n": 4})
    s.append(**row(0.0))
    with pytest.raises(DomainError):
        emit(s, "png")


def test_append_validation():
    s = MonitorSeries({"n": 4})
    s.append(**row(0.0))
    with pytest.raises(DomainError):
        s.append(**row(0.0))
    with pytest.raises(DomainError):
        s.append(**row(1.0, Q=math.nan))
    with pytest.raises(DomainError):
        s.append(t=2.0)


def test_svg_reference_line(bump_series):
    svg = emit(bump_series, "svg")
    root = ET.fromstring(svg)
    ns = "{http://www.w3.org/2000/svg}"
    refs = [p for p in root.iter(f"{ns}polyline") if p.get("class") == "reference"]
    assert len(refs) == 1
    assert float(refs[0].get("data-value")) == sharp_constant(5)
    assert len(list(root.iter(f"{ns}polyline"))) == 4


def test_svg_decimates_long_series():
    s = MonitorSeries({"n": 4})
    for k in range(5000):
        s.append(**row(k * 1e-3, umbilic_deviation=math.exp(-k * 1e-3)))
    root = ET.fromstring(emit(s, "svg"))
    for p in root.iter("{http://www.w3.org/2000/svg}polyline"):
        assert len(p.get("points").split()) <= 2000


def test_json_round_trip_is_exact(bump_series):
    again = parse_json(emit(bump_series, "json"))
    assert again == bump_series
    assert emit(again, "json") == emit(bump_series, "json")
    doc = json.loads(emit(bump_series, "json"))
    assert doc["columns"] == list(COLUMNS) and doc["metadata"]["n"] == 5


def test_csv_round_trip(bump_series):
    again = parse_csv(emit(bump_series, "csv"), bump_series.metadata)
    assert again == bump_series


@given(st.lists(st.floats(-1e300, 1e300, allow_nan=False), min_size=1, max_size=5))
def test_csv_round_trip_arbitrary_doubles(values):
    s = MonitorSeries({"n": 4})
    for k, x in enumerate(values):
        s.append(**row(float(k), Q=x, main_margin=-x))
    assert parse_csv(emit(s, "csv"), {"n": 4}) == s


def test_parse_rejects_foreign_documents():
    with pytest.raises(DomainError):
        parse_json(json.dumps({"schema": "nope"}))
    with pytest.raises(DomainError):
        parse_csv("a,b\n1,2\n")


def test_sphere_verdicts_pass(sphere_series):
    report = verdicts(sphere_series)
    assert report.passed
    assert {v.name for v in report.verdicts} == {
        "q_monotone", "q_lower_bound", "main_inequality_t0", "area_growth", "sphere_oracle"}
    assert report["q_monotone"].measured < 1e-10
    assert report["sphere_oracle"].measured < 1e-6
    text = report.to_text()
    assert "ALL PASS" in text and "sphere_oracle" in text


def test_n3_verdicts_exempt_monotonicity():
    series = run(FlowConfig(n=3, N=60, t_max=0.1, sample_interval=0.05))
    report = verdicts(series)
    assert report["q_monotone"].status == "exempt"
    assert report["gauss_bonnet"].status == "pass" and report["gauss_bonnet"].measured < 1e-4
    assert report.passed


def test_verdicts_flag_rising_q():
    s = MonitorSeries({"n": 5})
    for k, q in enumerate([30.0, 29.0, 29.5]):
        s.append(**row(float(k), Q=q, area=math.exp(1.01 * k)))
    report = verdicts(s, Tolerances())
    assert report["q_monotone"].status == "fail"
    assert report["q_monotone"].measured == pytest.approx(0.5)
    assert not report.passed
    assert report.to_dict()["passed"] is False


def test_verdicts_flag_slow_area_growth():
    s = MonitorSeries({"n": 5})
    for k in range(4):
        s.append(**row(float(k), Q=40.0 - k, area=math.exp(0.5 * k)))
    assert verdicts(s)["area_growth"].status == "fail"
