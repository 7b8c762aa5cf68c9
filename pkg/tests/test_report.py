import io
import json

import pytest

from daxsim import config as configmod
from daxsim.errors import EmitError, ReportMismatch
from daxsim.report import (
    CSV_HEADER, ExperimentReport, compare, emit, load_reports, read_csv, render, summarize, to_csv,
)
from daxsim.runner import run, run_once


def cfg(mode="ev", kind="rand_read", threads=2, region=16 * 1024, extra=""):
    return configmod.loads(f"""
mode = "{mode}"
{extra}
[workload]
kind = "{kind}"
threads = {threads}
region_bytes = {region}
""")


@pytest.fixture(scope="module")
def ev_report():
    return run_once(cfg("ev", "kv_skewed", extra="seeds = [3]"), 3)


def test_json_roundtrip(ev_report):
    again = ExperimentReport.from_json(ev_report.to_json())
    assert again == ev_report
    assert again.to_json() == ev_report.to_json()


def test_json_fields(ev_report):
    d = json.loads(ev_report.to_json())
    assert d["mode"] == "ev" and d["seed"] == 3
    assert d["workload"]["kind"] == "kv_skewed"
    assert d["config"]["machine"]["llc"]["associativity"] == 16
    assert d["audit"] == [] and d["silent_corruptions"] == 0
    assert d["energy_j"] == pytest.approx(d["energy_pj"] / 1e12)


def test_csv_header_and_full_precision(ev_report):
    text = to_csv([ev_report])
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    rows = read_csv(text)
    got = {metric: value for _, _, metric, value in rows}
    assert got == ev_report.metrics()
    assert isinstance(got["energy_j"], float)


def test_compare_with_self(ev_report):
    for m in compare(ev_report, ev_report).values():
        assert m["ratio"] == 1.0 and m["delta"] == 0


def test_read_overhead_ratios():
    off = run_once(cfg("off"), 1)
    ev = run_once(cfg("ev"), 1)
    naive = run_once(cfg("naive"), 1)
    assert compare(ev, off)["nvm_accesses"]["ratio"] == 2.0
    assert compare(naive, off)["nvm_accesses"]["ratio"] == 65.0
    assert ev.derived()["read_amplification"] == 2.0


def test_compare_needs_same_workload():
    a = run_once(cfg("off"), 1)
    b = run_once(cfg("off"), 2)
    with pytest.raises(ReportMismatch):
        compare(a, b)
    c = run_once(cfg("off", threads=1), 1)
    with pytest.raises(ReportMismatch):
        compare(a, c)


def test_compare_zero_baseline():
    off = run_once(cfg("off", "seq_write"), 1)
    ev = run_once(cfg("ev", "seq_write"), 1)
    r = compare(ev, off)["nvm_redundancy_writes"]
    assert r["baseline"] == 0 and r["ratio"] is None and r["delta"] > 0


def test_summarize_mean_and_rmse():
    reports, summary = run(cfg("ev", "kv_skewed"), [1, 2, 3])
    for key in ("nvm_accesses", "energy_j", "runtime_ns"):
        xs = [r.metrics()[key] for r in reports]
        mean = sum(xs) / 3
        assert summary[key]["mean"] == pytest.approx(mean)
        rmse = (sum((x - mean) ** 2 for x in xs) / 3) ** 0.5
        assert summary[key]["rmse"] == pytest.approx(rmse)


def test_summarize_single_seed_has_zero_error(ev_report):
    s = summarize([ev_report])
    assert all(v["rmse"] == 0 for v in s.values())


def test_emit_targets(tmp_path, ev_report, capsys):
    path = tmp_path / "r.json"
    emit([ev_report, ev_report], "json", str(path))
    assert load_reports(str(path)) == [ev_report, ev_report]
    buf = io.StringIO()
    emit(ev_report, "csv", buf)
    assert buf.getvalue() == to_csv([ev_report])
    emit(ev_report, "json")
    assert capsys.readouterr().out == ev_report.to_json()


def test_emit_unwritable(tmp_path, ev_report):
    with pytest.raises(EmitError):
        emit(ev_report, "json", str(tmp_path / "missing" / "r.json"))


def test_render_rejects_unknown_format(ev_report):
    with pytest.raises(ValueError):
        render(ev_report, "yaml")


def test_schema_version_checked(ev_report):
    d = ev_report.to_dict()
    d["schema_version"] = 99
    with pytest.raises(ValueError):
        ExperimentReport.from_dict(d)
