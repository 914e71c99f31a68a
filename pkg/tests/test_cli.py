import json

import pytest

from salem.cli import RunConfig, emit_reports, main, run_pipeline
from salem.errors import ConfigInvalid, RunNotFound

SMALL = {"M": [4, 8], "smax": 32, "measure_M": [8], "measure_smax": 512, "dft_M": [8], "grid_res": 1024,
         "dft_smax": 16, "cover_M": [4, 8], "levels": 1, "mask_res": 128, "csv_smax": 8}


def test_tau_rejected():
    with pytest.raises(ConfigInvalid) as exc:
        RunConfig.from_dict({"tau": 0.5})
    assert exc.value.field == "tau"


def test_unknown_key_rejected():
    with pytest.raises(ConfigInvalid):
        RunConfig.from_dict({"colour": 1})


def test_missing_field_file(tmp_path):
    missing = tmp_path / "nofield.json"
    with pytest.raises(ConfigInvalid) as exc:
        RunConfig.from_dict({"field": str(missing)})
    assert str(missing) in exc.value.reason


def test_missing_run(tmp_path):
    with pytest.raises(RunNotFound):
        emit_reports(tmp_path / "absent")


def test_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "none.json")]) == 2
    assert main(["report", str(tmp_path / "absent")]) == 1
    assert main(["field-info", "--field", "cbrt2"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["clearing_constant"] == 6 and info["signature"] == [1, 1]


def test_small_run_is_reproducible(tmp_path):
    runs = []
    for k in range(2):
        out = tmp_path / f"r{k}"
        cfg = RunConfig.from_dict({**SMALL, "out": str(out)})
        run_pipeline(cfg)
        runs.append(out)
    names = sorted(p.relative_to(runs[0]) for p in runs[0].rglob("*.csv"))
    assert names
    for name in names:
        assert (runs[0] / name).read_bytes() == (runs[1] / name).read_bytes()
    summary = json.loads((runs[0] / "summary.json").read_text())
    rows = {c["check"]: c["status"] for c in summary["checks"]}
    assert rows["zero band M=8"] == "PASS"
    assert rows["covering sums s=2.2 decrease"] == "PASS"
    assert summary["ok"] is all(c["status"] != "FAIL" for c in summary["checks"])
    assert "overall" in emit_reports(runs[0])
