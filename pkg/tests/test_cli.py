import io
import json

import pytest

from invdet.cli import RunConfig, UsageError, run


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_zeta_example():
    code, out, _ = _run("zeta", "--field", "GAUSSIAN", "--s", "1", "--limit", "10")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "2.5861"
    assert lines[1] == "n,z,N,zeta1"
    assert lines[-1].startswith("10,2,9,2.5861")


def test_units_example():
    code, out, _ = _run("units", "--field", "REAL_QUADRATIC_5", "--radius", "10", "--format", "csv")
    assert code == 0
    row = out.splitlines()[1].split(",")
    assert row[1] == "18"
    assert float(row[2]) == pytest.approx(19.14, abs=5e-3)


def test_detsum_example():
    code, out, _ = _run("detsum", "--field", "GAUSSIAN", "--radius", "2", "--m", "2")
    assert code == 0
    assert "7.0000" in out.splitlines()[1]


def test_detsum_csv_deterministic(tmp_path):
    args = ["detsum", "--field", "CYCLOTOMIC_5", "--radii", "3,5,8", "--n-r", "1", "--format", "csv"]
    a = _run(*args, "--threads", "1")[1]
    b = _run(*args, "--threads", "4")[1]
    assert a == b
    assert a.splitlines()[0] == "M,m,value,point_count,min_abs_det"


def test_json_output():
    code, out, _ = _run("units", "--field", "REAL_QUADRATIC_5", "--radii", "10,100", "--format", "json")
    data = json.loads(out)
    assert code == 0 and [r["count"] for r in data["rows"]] == [18, 38]


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["bogus"],
        ["detsum", "--field", "GAUSSIAN", "--radius", "2"],
        ["detsum", "--field", "GAUSSIAN", "--algebra", "ALAMOUTI", "--radius", "2", "--m", "2"],
        ["detsum", "--field", "GAUSSIAN", "--m", "2"],
        ["detsum", "--field", "GAUSSIAN", "--radii", "3,2", "--m", "2"],
        ["detsum", "--field", "GAUSSIAN", "--radius", "2", "--m", "2", "--n-r", "2"],
        ["report", "--field", "GAUSSIAN", "--m", "4", "--radius", "50", "--slack", "1.5"],
        ["units", "--field", "GAUSSIAN", "--radius", "2", "--format", "xml"],
        ["field"],
    ],
)
def test_usage_errors(argv):
    assert _run(*argv)[0] == 64


def test_scope_and_budget_exit_codes():
    assert _run("field", "info", "--field", "NOPE")[0] == 1
    assert _run("report", "--field", "REAL_QUADRATIC_5", "--m", "0.5", "--radius", "100")[0] == 1
    code, _, err = _run("detsum", "--field", "CYCLOTOMIC_20", "--radius", "1000", "--m", "4", "--method", "direct")
    assert code == 2 and "budget" in err
    assert _run("detsum", "--field", "GAUSSIAN", "--radius", "50", "--m", "2", "--budget", "10")[0] == 2


def test_info_commands():
    code, out, _ = _run("field", "info", "--field", "REAL_QUADRATIC_5", "--format", "csv")
    assert code == 0 and "discriminant,5" in out
    code, out, _ = _run("lattice", "vol", "--algebra", "HAMILTON_SQRT5", "--format", "csv")
    rows = dict(line.split(",", 1) for line in out.splitlines()[1:])
    assert code == 0 and float(rows["volume"]) == pytest.approx(400.0, rel=1e-12)


def test_qo_commands():
    code, out, _ = _run("qo", "check", "--algebra", "HAMILTON_SQRT5", "--samples", "20", "--format", "csv")
    assert code == 0
    assert all(line.endswith("true") for line in out.splitlines()[1:])
    code, out, _ = _run("qo", "detsum", "--algebra", "ALAMOUTI", "--radii", "3,6", "--n-r", "2", "--format", "csv")
    assert code == 0 and len(out.splitlines()) == 3


def test_union_bound_flag():
    code, out, _ = _run("detsum", "--field", "GAUSSIAN", "--radius", "1", "--n-r", "2", "--union-bound", "--format", "csv")
    assert code == 0 and out.splitlines()[1].startswith("1.0,4.0,5.25,")


def test_report_and_compare(tmp_path):
    path = tmp_path / "report.csv"
    code, _, _ = _run("report", "--field", "GAUSSIAN", "--n-r", "2", "--log-grid", "4:5:1", "--format", "csv", "--output", str(path))
    assert code == 0
    assert path.read_text().splitlines()[0] == "label,bound,M,log_M,series,value"
    code, out, _ = _run("compare", "--qo", "ALAMOUTI", "--nf", "GAUSSIAN", "--n-r", "2", "--log-grid", "2:5:1", "--min-span", "1.5")
    assert code == 0 and "ratio increasing" in out


def test_config_round_trip(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    code, direct, _ = _run("units", "--field", "REAL_QUADRATIC_5", "--radii", "10,100", "--format", "csv", "--save-config", str(cfg_path))
    assert code == 0
    cfg = RunConfig.from_json(cfg_path.read_text())
    assert RunConfig.from_json(cfg.to_json()) == cfg
    code, replay, _ = _run("--config", str(cfg_path))
    assert code == 0 and replay == direct


def test_config_rejects_unknown_keys():
    with pytest.raises(UsageError):
        RunConfig.from_json('{"command": "units", "colour": 1}')
