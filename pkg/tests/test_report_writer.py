import csv
import io
import json

import pytest

from core.errors import ConfigError
from services.experiment_runner import Comparison, NetworkInfo, ReportRow, RunReport
from services.report_writer import CSV_COLUMNS, emit_report, summary_frame


def _row(**overrides):
    values = dict(
        network="bridge.net", method="cbat_mcs", tier=1, n_sim=10000, n_run=3,
        mean=0.7661, variance=2.5e-06, mae=0.0012, mean_time_s=None,
        min_time_s=None, max_time_s=None, estimates=[0.765, 0.7661, 0.7672], times_s=None,
    )
    values.update(overrides)
    return ReportRow(**values)


def _report(rows=None):
    return RunReport(
        seed=7,
        n_run=3,
        networks=[NetworkInfo("bridge.net", 4, 5, 0.766)],
        rows=rows if rows is not None else [_row()],
        comparisons=[Comparison("bridge.net", 1, "crude", "cbat_mcs", 0.42, None)],
    )


def test_empty_report_is_header_only():
    text = emit_report(RunReport(seed=1, n_run=2), "csv").decode()
    assert text.strip().splitlines() == [",".join(CSV_COLUMNS)]


def test_one_row_csv():
    text = emit_report(_report(), "csv").decode()
    lines = text.strip().splitlines()
    assert len(lines) == 2
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert parsed[0]["method"] == "cbat_mcs"
    assert float(parsed[0]["mean"]) == 0.7661
    assert float(parsed[0]["variance"]) == 2.5e-06
    assert parsed[0]["mean_time_s"] == ""


def test_csv_uses_significant_digits():
    text = emit_report(_report([_row(mean=0.12345678901234)]), "csv").decode()
    assert "0.123456789" in text
    assert "0.1234567890123" not in text


def test_missing_mae_is_empty_not_zero():
    parsed = list(csv.DictReader(io.StringIO(emit_report(_report([_row(mae=None)]), "csv").decode())))
    assert parsed[0]["mae"] == ""


def test_json_round_trip_is_byte_identical():
    first = emit_report(_report(), "json")
    again = emit_report(RunReport.from_dict(json.loads(first)), "json")
    assert first == again


def test_json_is_lossless():
    data = json.loads(emit_report(_report(), "json"))
    assert data["rows"][0]["estimates"] == [0.765, 0.7661, 0.7672]
    assert data["networks"][0]["exact"] == 0.766
    assert data["comparisons"][0]["p_value"] == 0.42


def test_summary_frame_columns():
    frame = summary_frame(_report())
    assert frame.columns == CSV_COLUMNS
    assert frame.height == 1


def test_unknown_format():
    with pytest.raises(ConfigError):
        emit_report(_report(), "xml")
