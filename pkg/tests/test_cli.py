"""End-to-end tests of the command line: golden outputs, exit codes,
JSON error payloads, file round trips, and determinism."""

import json

import pytest

from freemoments.cli import main
from freemoments.measures import Measure, measure_to_json
from freemoments.rmt import MatrixEnsembleSpec, ensemble_spec_to_json


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, *argv):
    code, out, _ = run_cli(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def semicircle_file(tmp_path):
    path = tmp_path / "semicircle.json"
    path.write_text(json.dumps(measure_to_json(Measure.semicircle(0, 2))))
    return str(path)


@pytest.fixture
def two_atom_file(tmp_path):
    mu = Measure.discrete([(-1, "1/2"), (1, "1/2")])
    path = tmp_path / "two_atom.json"
    path.write_text(json.dumps(measure_to_json(mu)))
    return str(path)


# ------------------------------------------------------------ exact goldens


def test_nc_count_golden(capsys):
    code, data = run_json(capsys, "nc", "--count", "4")
    assert code == 0
    assert data == {"n": 4, "count": 14}


def test_nc_list(capsys):
    code, data = run_json(capsys, "nc", "--list", "3")
    assert code == 0
    assert data["count"] == 5
    assert [[1], [2], [3]] in data["partitions"]
    assert [[1, 2, 3]] in data["partitions"]


def test_nc_kreweras(capsys):
    code, data = run_json(capsys, "nc", "--kreweras", "[[1,3],[2]]")
    assert code == 0
    assert data["kreweras"] == [[1, 2], [3]]


def test_nc_mobius_top_interval(capsys):
    code, data = run_json(capsys, "nc", "--mobius", "[[1],[2],[3],[4]]")
    assert code == 0
    assert data["mobius"] == -5


def test_cumulants_golden(capsys):
    code, data = run_json(capsys, "cumulants", "--free", "--moments", "[0,1,0,2]")
    assert code == 0
    assert data["k"] == ["0", "1", "0", "0"]


def test_cumulants_classical(capsys):
    code, data = run_json(capsys, "cumulants", "--classical", "--moments", "[0,1,0,3]")
    assert code == 0
    assert data["k"] == ["0", "1", "0", "0"]


def test_moments_from_cumulants(capsys):
    code, data = run_json(capsys, "moments", "--cumulants", '["0","1","0","0"]')
    assert code == 0
    assert data["m"] == ["0", "1", "0", "2"]


def test_moments_from_measure_file(capsys, semicircle_file):
    code, data = run_json(
        capsys, "moments", "--measure", semicircle_file, "--order", "6"
    )
    assert code == 0
    assert data["m"] == ["0", "1", "0", "2", "0", "5"]


def test_freeconv_bernoulli_self_sum(capsys):
    code, data = run_json(capsys, "freeconv", "--a", "[0,1,0,1]", "--b", "[0,1,0,1]")
    assert code == 0
    assert data["m"] == ["0", "2", "0", "6"]


def test_rseries_matches_cumulants(capsys):
    code, data = run_json(capsys, "rseries", "--moments", '["1","2","5","14"]')
    assert code == 0
    assert data["r"] == ["1", "1", "1", "1"]


def test_support_bound_from_moments(capsys):
    code, data = run_json(capsys, "support-bound", "--moments", "[0,1,0,2,0,5]")
    assert code == 0
    assert data["bound"] == "16"


def test_support_bound_from_cumulants(capsys):
    code, data = run_json(capsys, "support-bound", "--cumulants", '["0","1/4"]')
    assert code == 0
    assert data["bound"] == "8"


def test_levy_tables_both_kinds(capsys, tmp_path):
    sigma = tmp_path / "sigma.json"
    sigma.write_text(
        json.dumps(measure_to_json(Measure.discrete([(1, "1/2")])))
    )
    code, data = run_json(
        capsys, "levy", "--gamma", "1/2", "--sigma", str(sigma), "--order", "4"
    )
    assert code == 0
    assert data["cumulants"] == ["1", "1", "1", "1"]
    assert data["moments"] == ["1", "2", "5", "14"]
    code, data = run_json(
        capsys,
        "levy", "--gamma", "1/2", "--sigma", str(sigma), "--order", "4",
        "--classical",
    )
    assert code == 0
    assert data["cumulants"] == ["1", "1", "1", "1"]
    assert data["moments"] == ["1", "2", "5", "15"]


# ------------------------------------------------------- validation errors


@pytest.mark.parametrize(
    "argv",
    [
        ("nc",),
        ("nc", "--count", "4", "--list", "3"),
        ("nc", "--unknown-flag"),
        ("cumulants", "--moments", "not json"),
        ("cumulants", "--moments", "[]"),
        ("moments", "--cumulants", "[1]", "--measure", "x.json"),
        ("freeconv", "--a", "[0,1]", "--b", "[0,1,0]"),
        ("no-such-subcommand",),
        ("verify",),
        ("verify", "--measure", "/nonexistent.json", "--order", "2"),
        ("verify", "--suite", "--only", "no-such-criterion"),
    ],
)
def test_validation_problems_exit_1(capsys, argv):
    code, out, _ = run_cli(capsys, *argv)
    assert code == 1
    payload = json.loads(out)
    assert set(payload) == {"error", "detail"}


def test_float_literals_rejected(capsys):
    code, data = run_json(capsys, "cumulants", "--moments", "[0, 0.5]")
    assert code == 1
    assert data["error"] == "validation"
    assert "0.5" in data["detail"]


def test_error_payload_carries_code(capsys):
    code, data = run_json(capsys, "moments", "--cumulants", '["1/0"]')
    assert code == 1
    assert data["error"] == "validation"


# ----------------------------------------------------------- numeric paths


def test_rtransform_report(capsys, tmp_path, two_atom_file):
    report = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys,
        "rtransform", "--measure", two_atom_file, "--order", "3",
        "--tol", "1e-8", "--report", str(report),
    )
    assert code == 0
    assert out == ""  # report went to the file, not stdout
    data = json.loads(report.read_text())
    assert data["within_tol"] is True
    assert len(data["points"]) == 41
    assert {"index", "radius", "r_value", "residual", "stability"} <= set(
        data["points"][0]
    )
    coeffs = data["coefficients"]
    # two-atom measure at +-1: first cumulants are 0, 1, 0
    assert abs(float(coeffs[0]["real"])) < 1e-12
    assert abs(float(coeffs[1]["real"]) - 1) < 1e-12
    assert not any(row["nonreal"] for row in coeffs)


def test_rtransform_tol_failure_exits_2(capsys, two_atom_file):
    code, out, _ = run_cli(
        capsys,
        "rtransform", "--measure", two_atom_file, "--order", "3",
        "--tol", "1e-60",
    )
    assert code == 2
    assert json.loads(out)["within_tol"] is False


def test_rtransform_bad_ray_exits_1(capsys, two_atom_file):
    code, out, _ = run_cli(
        capsys,
        "rtransform", "--measure", two_atom_file, "--order", "3",
        "--tilt", "2",
    )
    assert code == 1
    assert json.loads(out)["error"] == "validation"


@pytest.fixture
def gue_spec_file(tmp_path):
    spec = MatrixEnsembleSpec(kind="gue", dim=60, trials=6, seed=11)
    path = tmp_path / "gue.json"
    path.write_text(json.dumps(ensemble_spec_to_json(spec)))
    return str(path)


def test_simulate_deterministic_and_seed_override(capsys, gue_spec_file):
    code1, out1, _ = run_cli(capsys, "simulate", "--spec", gue_spec_file, "--order", "4")
    code2, out2, _ = run_cli(capsys, "simulate", "--spec", gue_spec_file, "--order", "4")
    assert code1 == code2 == 0
    assert out1 == out2
    code3, out3, _ = run_cli(
        capsys, "simulate", "--spec", gue_spec_file, "--order", "4", "--seed", "12"
    )
    assert code3 == 0
    assert out3 != out1
    data = json.loads(out3)
    assert data["spec"]["seed"] == 12
    assert data["estimate"]["rng"] == "numpy-pcg64"
    assert len(data["comparison"]) == 4


def test_simulate_out_file(capsys, gue_spec_file, tmp_path):
    out_path = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys,
        "simulate", "--spec", gue_spec_file, "--order", "2", "--out", str(out_path),
    )
    assert code == 0
    assert out == ""
    data = json.loads(out_path.read_text())
    assert data["predicted"] == ["0", "1"]


def test_simulate_budget_exit_2(capsys, gue_spec_file):
    code, data = run_json(
        capsys,
        "simulate", "--spec", gue_spec_file, "--order", "4", "--budget", "10",
    )
    assert code == 2
    assert data["error"] == "budget"


def test_simulate_exact_for_deterministic_measure(capsys, tmp_path):
    mu = Measure.discrete([(-1, "1/2"), (1, "1/2")])
    spec = MatrixEnsembleSpec(kind="deterministic", dim=30, trials=2, seed=0, measure=mu)
    path = tmp_path / "det.json"
    path.write_text(json.dumps(ensemble_spec_to_json(spec)))
    code, data = run_json(capsys, "simulate", "--spec", str(path), "--order", "4")
    assert code == 0
    assert data["within"] is True
    assert data["estimate"]["means"] == [0.0, 1.0, 0.0, 1.0]


# ----------------------------------------------------------------- verify


def test_verify_single_measure(capsys, two_atom_file):
    code, data = run_json(
        capsys, "verify", "--measure", two_atom_file, "--order", "4"
    )
    assert code == 0
    assert data["passed"] is True
    assert data["exact"] == ["0", "1", "0", "-1"]
    assert float(data["max_error"]) < 1e-4


def test_verify_suite_filter_and_report_lines(capsys):
    code, out, err = run_cli(
        capsys, "verify", "--suite", "--only", "support-bound,levy-correspondents"
    )
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert [c["slug"] for c in data["criteria"]] == [
        "support-bound",
        "levy-correspondents",
    ]
    lines = err.strip().splitlines()
    assert lines[0].startswith("PASS support-bound")
    assert lines[1].startswith("PASS levy-correspondents")
    assert lines[-1] == "2/2 criteria passed"


def test_verify_suite_negative_control_named_failure(capsys):
    code, out, err = run_cli(
        capsys,
        "verify", "--suite", "--only", "taylor-recovery",
        "--corrupt-semicircle", "[0,1,0,1]",
    )
    assert code == 2
    data = json.loads(out)
    assert data["passed"] is False
    taylor = data["criteria"][0]
    assert taylor["slug"] == "taylor-recovery"
    assert taylor["passed"] is False
    assert "semicircle" in taylor["detail"]
    assert "FAIL taylor-recovery" in err
