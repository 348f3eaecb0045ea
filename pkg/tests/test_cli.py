import io
import json
from pathlib import Path

import pandas as pd
import pytest

from cubecocycle.cli import (
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    main,
    parse_z_grid,
)
from cubecocycle.exceptions import ConfigError
from cubecocycle.verification import Report

ASSETS = Path(__file__).resolve().parents[1] / "assets"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_parse_z_grid():
    assert parse_z_grid("3x4@0.9") == (3, 4, 0.9)
    assert parse_z_grid("2×5@.5") == (2, 5, 0.5)
    with pytest.raises(ConfigError):
        parse_z_grid("3by4")


def test_run_config_checks():
    with pytest.raises(ConfigError):
        RunConfig("verify")
    with pytest.raises(ConfigError):
        RunConfig("verify", family="square", input="square.json")
    with pytest.raises(ConfigError):
        RunConfig("verify", family="square", z_grid="3x4@1.0")
    with pytest.raises(ConfigError):
        RunConfig("verify", family="square", jobs=0)
    with pytest.raises(ConfigError):
        RunConfig("coefficients", family="square", x=0)
    assert RunConfig("verify", family="square").grid == (3, 4, 0.95)


def test_validate_square(capsys):
    code, out, _ = run(
        capsys, "validate", "--input", str(ASSETS / "square.json")
    )
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["summary"]["fail"] == 0
    assert document["command"] == "validate"


def test_validate_unfilled_square(capsys):
    code, out, err = run(
        capsys, "validate", "--input", str(ASSETS / "unfilled_square.json")
    )
    assert code == EXIT_FAILURE
    record = json.loads(out)["records"][0]
    assert record["status"] == "fail"
    assert record["witness"]["failure"] == "squares"
    assert "FAIL complex.validate" in err


def test_truncated_input(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"n_vertices": 4, "cubes": [[0, 1')
    code, _, err = run(capsys, "validate", "--input", str(path))
    assert code == EXIT_USAGE
    assert "malformed JSON" in err


def test_usage_errors(capsys):
    assert run(capsys, "verify", "--family", "banana:2")[0] == EXIT_USAGE
    code = run(
        capsys, "norm-scan", "--family", "segment:2", "--z-grid", "2x2@1.5"
    )[0]
    assert code == EXIT_USAGE
    code = run(capsys, "verify", "--input", "missing.json")[0]
    assert code == EXIT_USAGE
    code = run(
        capsys, "generate", "--family", "grid:9x9", "--max-vertices", "10"
    )[0]
    assert code == EXIT_USAGE


def test_generate(capsys):
    code, out, _ = run(capsys, "generate", "--family", "grid:2x3")
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["n_vertices"] == 12
    assert document["dim"] == 2
    assert len(document["hyperplanes"]) == 5


def test_coefficients(capsys):
    code, out, _ = run(
        capsys, "coefficients", "--family", "segment:3", "0", "3"
    )
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["agree"]
    corner = [e for e in document["entries"] if (e["a"], e["b"]) == (0, 3)]
    assert (corner[0]["sign"], corner[0]["k"], corner[0]["ell"]) == (1, 3, 0)
    code = run(capsys, "coefficients", "--family", "segment:3", "0", "9")[0]
    assert code == EXIT_USAGE


def test_norm_scan_csv(capsys, tmp_path):
    out = tmp_path / "scan.csv"
    code, _, err = run(
        capsys,
        "norm-scan",
        "--family",
        "tree(2,2)",
        "--z-grid",
        "2x3@0.8",
        "--max-pairs",
        "10",
        "--format",
        "csv",
        "--out",
        str(out),
        "--jobs",
        "1",
    )
    assert code == EXIT_OK
    frame = pd.read_csv(out)
    assert len(frame) == 10 * 7
    assert frame["pass"].all()
    assert "(sampled)" in err


def test_verify_with_store(capsys, tmp_path):
    store = tmp_path / "report.json"
    code, out, _ = run(
        capsys,
        "verify",
        "--family",
        "segment:3",
        "--max-pairs",
        "16",
        "--jobs",
        "2",
        "--z-grid",
        "2x3@0.8",
        "--store",
        str(store),
    )
    assert code == EXIT_OK
    document = json.loads(out)
    assert document["summary"]["fail"] == 0
    assert document["summary"]["error"] == 0
    stored = Report.load(str(store))
    assert len(stored.records) == document["summary"]["total"]
    assert stored.config["family"] == "segment:3"


def test_verify_csv(capsys):
    code, out, _ = run(
        capsys,
        "verify",
        "--family",
        "square",
        "--max-pairs",
        "4",
        "--format",
        "csv",
    )
    assert code == EXIT_OK
    frame = pd.read_csv(io.StringIO(out))
    assert set(frame["status"]) == {"pass"}
    assert "representation.equivariance" in set(frame["check"])
