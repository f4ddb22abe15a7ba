"""
Integration tests for the command-line interface.

Author: Ruslan Magana Vsevolodovna
Website: ruslanmv.com
License: Apache 2.0
"""

import json

import pytest

from config import CURVES_DIR
from real_subbundle_lab import __version__
from real_subbundle_lab.cli import EXIT_ERROR, EXIT_OK, EXIT_VIOLATION, dispatch
from real_subbundle_lab.reports import CSV_META_PREFIX
from real_subbundle_lab.survey import TrichotomyVerdict

C1 = str(CURVES_DIR / "c1.json")
C4 = str(CURVES_DIR / "c4.json")


def _run(capsys, *argv):
    code = dispatch(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.mark.integration
def test_classify(capsys):
    """classify prints the topological type with a meta block."""
    code, out, _ = _run(capsys, "classify", "--curve", C4)
    payload = json.loads(out)
    assert code == EXIT_OK
    assert (payload["n"], payload["a"], payload["m"]) == (3, 0, 3)
    meta = payload["meta"]
    assert meta["version"] == __version__
    assert len(meta["curve_hash"]) == 64
    assert meta["tolerances"]["equality"] == 1e-9


@pytest.mark.integration
def test_circles(capsys):
    """circles lists fixed circles and anti-real arcs."""
    code, out, _ = _run(capsys, "circles", "--curve", C4)
    payload = json.loads(out)
    assert code == EXIT_OK
    assert len(payload["fixed_circles"]) == 3
    assert len(payload["anti_real"]) == 3
    assert payload["fixed_circles"][2]["through_infinity"] is True


@pytest.mark.integration
def test_torsion(capsys):
    """torsion lists sixteen classes and records the seed."""
    code, out, _ = _run(capsys, "torsion", "--curve", C1, "--seed", "3")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert len(payload["classes"]) == 16
    assert payload["real_count"] == 4
    assert payload["meta"]["seed"] == 3


@pytest.mark.integration
def test_orbit_of_all_real_divisor(capsys, tmp_path):
    """orbit reads a divisor file and reports four real members."""
    literal = tmp_path / "d.json"
    literal.write_text(json.dumps([{"x": [-1.0, 0.0]}, {"x": [0.5, 0.0]}, {"x": [2.0, 0.0]}]))
    code, out, _ = _run(capsys, "orbit", "--curve", C1, "--divisor", str(literal))
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["count"] == 4
    assert payload["case"] == "real_base"
    assert payload["signature"] == [1]


@pytest.mark.integration
def test_survey_verdict_and_reproducible_files(capsys, tmp_path):
    """Two survey runs with one seed write identical files."""
    outputs = []
    for name in ("a.json", "b.json"):
        target = tmp_path / name
        code, _, _ = _run(
            capsys,
            "survey", "--curve", C4, "--lambda", "111", "--trials", "120",
            "--seed", "7", "--min-trials", "100", "--out", str(target),
        )
        assert code == EXIT_OK
        outputs.append(target.read_bytes())
    assert outputs[0] == outputs[1]
    payload = json.loads(outputs[0])
    assert payload["verdict"]["verdict"] == "case2"
    assert payload["meta"]["seed"] == 7
    assert set(payload["results"]) == {"all_real", "uniform_projectively_real"}


@pytest.mark.integration
def test_survey_csv(capsys):
    """CSV output starts with the meta line and then one row per trial."""
    code, out, _ = _run(
        capsys,
        "survey", "--curve", C4, "--lambda", "111", "--recipe", "all_real",
        "--trials", "10", "--format", "csv",
    )
    lines = out.strip().splitlines()
    assert code == EXIT_OK
    assert lines[0].startswith(CSV_META_PREFIX)
    meta = json.loads(lines[0][len(CSV_META_PREFIX):])
    assert len(meta["curve_hash"]) == 64
    assert meta["seed"] == 0
    assert meta["version"] == __version__
    assert meta["tolerances"]["equality"] == 1e-9
    assert meta["lambda"] == "111"
    assert lines[1] == "trial,recipe,count,flags,signature"
    assert len(lines) == 12
    assert lines[2].startswith("0,all_real,4,")


@pytest.mark.integration
def test_survey_insufficient_data(capsys):
    """Too few trials per cell exit with code 1."""
    code, _, err = _run(capsys, "survey", "--curve", C4, "--lambda", "111", "--trials", "20")
    assert code == EXIT_ERROR
    assert "❌" in err


@pytest.mark.integration
def test_survey_violation_exit_code(capsys, mocker):
    """A trichotomy violation exits with code 2."""
    mocker.patch("real_subbundle_lab.cli.run_battery", return_value={})
    mocker.patch(
        "real_subbundle_lab.cli.trichotomy_verdict",
        return_value=TrichotomyVerdict("violation", "case1", "case2", (2, 4), {"all_real": 1000}),
    )
    code, out, err = _run(capsys, "survey", "--curve", C4, "--lambda", "111")
    assert code == EXIT_VIOLATION
    assert json.loads(out)["verdict"]["verdict"] == "violation"
    assert "trichotomy violation" in err


@pytest.mark.integration
def test_subbundle_types(capsys):
    """subbundle-types reports one assignment or the full table."""
    code, out, _ = _run(capsys, "subbundle-types", "--n", "3", "--lambda", "111")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["max_distinct"] == 4
    assert payload["assignments"][0]["relative_types"] == ["000", "011", "101", "110"]

    code, out, _ = _run(capsys, "subbundle-types", "--all")
    assert code == EXIT_OK
    assert len(json.loads(out)["table"]) == 7


@pytest.mark.integration
def test_newstead(capsys):
    """newstead reports all thirty-two sign forms."""
    code, out, _ = _run(capsys, "newstead", "--curve", C4, "--count", "5", "--seed", "1")
    payload = json.loads(out)
    assert code == EXIT_OK
    assert len(payload["forms"]) == 32
    plus = next(row for row in payload["forms"] if row["epsilon"] == "++++++")
    assert plus["points_found"] == 0


@pytest.mark.integration
def test_tolerance_override_is_recorded(capsys):
    """A --tol override reaches both the settings and the curve."""
    code, out, _ = _run(capsys, "--tol", "equality=1e-10", "classify", "--curve", C4)
    payload = json.loads(out)
    assert code == EXIT_OK
    assert payload["meta"]["tolerances"]["equality"] == 1e-10
    assert payload["meta"]["curve"]["tol"] == 1e-10


@pytest.mark.integration
def test_run_config_file(capsys, tmp_path):
    """Values from a run configuration file are used."""
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"curve": C4, "seed": 5}))
    code, out, _ = _run(capsys, "--config", str(config), "torsion")
    assert code == EXIT_OK
    assert json.loads(out)["meta"]["seed"] == 5


@pytest.mark.integration
@pytest.mark.parametrize(
    "argv",
    [
        ["classify", "--curve", "missing.json"],
        ["survey", "--curve", C4, "--lambda", "11"],
        ["--tol", "bogus=1", "classify", "--curve", C4],
        ["orbit", "--curve", C4],
        ["no-such-command"],
    ],
)
def test_errors_exit_one(capsys, argv):
    """Bad input of any kind exits with code 1 and a message."""
    code, _, err = _run(capsys, *argv)
    assert code == EXIT_ERROR
    assert err.strip()


@pytest.mark.integration
def test_unknown_config_key(capsys, tmp_path):
    """Unknown run configuration keys are named in the error."""
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"curve": C4, "colour": "blue"}))
    code, _, err = _run(capsys, "--config", str(config), "classify")
    assert code == EXIT_ERROR
    assert "colour" in err
