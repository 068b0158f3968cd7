"""
Tests for the percolab command-line front end.
"""
import pytest
import sys
import os
import json
from typing import Any, Dict, List

# Add the project root to the path
sys.path.append(os.path.abspath(os.path.join(os.path.dirname(__file__), '../../../')))
from src.cli.main import EXIT_BUDGET, EXIT_DOMAIN, EXIT_INVARIANT, EXIT_OK, EXIT_USAGE, main

FORCED = ["--region", "1", "--x", "0,0", "--y", "0,0", "--p-h", "0.3", "--p-v", "0.5"]


def run(capsys, argv: List[str]) -> Dict[str, Any]:
    """Run the CLI and return the exit code together with the parsed JSON document."""
    code = main(argv)
    out = capsys.readouterr().out
    return {"code": code, "document": json.loads(out) if out.strip().startswith("{") else None, "raw": out}


def test_beta_value(capsys):
    """beta 1 2 prints 6."""
    result = run(capsys, ["beta", "1", "2"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["beta"] == 6
    assert record["norm"] == 10
    assert result["document"]["header"]["command"] == "beta"


def test_beta_flag_form(capsys):
    result = run(capsys, ["beta", "--x", "2,4"])
    assert result["document"]["records"][0]["beta"] == 105


def test_beta_alpha_table(capsys):
    result = run(capsys, ["beta", "--rho", "2", "--n-max", "2"])
    assert result["code"] == EXIT_OK
    rows = result["document"]["records"]
    assert [(r["n"], r["alpha"]) for r in rows] == [(1, 6), (2, 105)]


def test_beta_rejects_zero_coordinate(capsys):
    assert main(["beta", "0", "2"]) == EXIT_USAGE


def test_beta_rejects_fractional_slope(capsys):
    assert main(["beta", "--rho", "3/2", "--n-max", "2"]) == EXIT_USAGE


def test_census_with_lemma(capsys):
    result = run(capsys, ["census", "1", "1", "12", "--threads", "1"])
    assert result["code"] == EXIT_OK
    records = result["document"]["records"]
    counts = {r["n"]: r["count"] for r in records if r["table"] == "census"}
    assert counts[8] == 3
    assert counts[9] == 0
    lemma = [r for r in records if r["table"] == "lemma"]
    assert len(lemma) == 5
    assert all(r["holds"] for r in lemma)
    assert next(r for r in lemma if r["m"] == 2)["rhs"] == 12096


def test_census_below_norm(capsys):
    assert main(["census", "1", "1", "7"]) == EXIT_USAGE


def test_census_budget(capsys):
    assert main(["census", "--x", "1,1", "--n-max", "12", "--budget", "10", "--threads", "1"]) == EXIT_BUDGET


def test_exact_forced_value(capsys):
    result = run(capsys, ["exact"] + FORCED)
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["value"] == pytest.approx(0.1225, rel=1e-12)
    assert record["region"] == "[-1,1]x[-1,1]"


def test_exact_rational(capsys):
    result = run(capsys, ["exact"] + FORCED + ["--engine", "brute_rational"])
    assert result["code"] == EXIT_OK
    assert result["document"]["records"][0]["exact_value"] == "49/400"


def test_exact_negative_region_bounds(capsys):
    result = run(capsys, ["exact", "--region=-1,2,-1,2", "--x", "0,0", "--y", "1,1", "--p-h", "0.5", "--eta", "1"])
    assert result["code"] == EXIT_OK
    assert 0 < result["document"]["records"][0]["value"] < 1


def test_exact_brute_force_cap(capsys):
    """[-2, 2]^2 has 40 edges, above the brute-force cap."""
    assert main(["exact", "--region", "2", "--x", "0,0", "--y", "0,0", "--p-h", "0.5", "--p-v", "0.5",
                 "--engine", "brute"]) == EXIT_BUDGET


def test_exact_missing_params(capsys):
    assert main(["exact", "--region", "1", "--x", "0,0", "--y", "0,0", "--p-h", "0.5"]) == EXIT_USAGE


def test_exact_boundary_vertex(capsys):
    assert main(["exact", "--region", "1", "--x", "0,0", "--y", "1,1", "--p-h", "0.5", "--p-v", "0.5"]) == EXIT_DOMAIN


def test_probability_out_of_range(capsys):
    assert main(["exact", "--region", "1", "--x", "0,0", "--y", "0,0", "--p-h", "1.5", "--p-v", "0.5"]) == EXIT_USAGE


def test_mc_deterministic_across_threads(capsys):
    base = ["mc"] + FORCED + ["--n", "5000", "--seed", "7"]
    one = run(capsys, base + ["--threads", "1"])["document"]["records"][0]
    four = run(capsys, base + ["--threads", "4"])["document"]["records"][0]
    one.pop("runtime_ms")
    four.pop("runtime_ms")
    assert one == four
    assert one["n"] == 5000


def test_mc_requires_seed(capsys):
    assert main(["mc"] + FORCED + ["--n", "100"]) == EXIT_USAGE


def test_mc_pair(capsys):
    result = run(capsys, ["mc", "--pair", "--region=-1,3,-1,3", "--x", "1,2", "--p-h", "0.5", "--p-v", "0.5",
                          "--n", "2000", "--seed", "1", "--threads", "1"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["x_prime"] == [2, 1]
    assert record["coupled_d_hat"] == 0.0


def test_bounds_hold(capsys):
    result = run(capsys, ["bounds", "--p-h", "0.9999", "--eta", "0.2", "--x", "1,2"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["holds"] is True
    assert record["eta_tilde"] == pytest.approx(0.9932, abs=1e-3)


def test_bounds_invalid_regime(capsys):
    assert main(["bounds", "--p-h", "0.9", "--eta", "0.5", "--x", "1,2"]) == EXIT_DOMAIN


def test_threshold(capsys):
    result = run(capsys, ["threshold", "--eta", "0.5", "--rho", "2", "--n-max", "3", "--grid-size", "100"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["found"] is True
    assert len(record["rows"]) == 3
    assert 64 / 65 < record["p_star"] < 1


def test_threshold_rejects_slope_one(capsys):
    assert main(["threshold", "--eta", "0.5", "--rho", "1", "--n-max", "3"]) == EXIT_USAGE


def test_csv_format(capsys):
    result = run(capsys, ["beta", "1", "2", "--format", "csv"])
    lines = result["raw"].splitlines()
    assert lines[0].startswith("# {")
    assert lines[1] == "x1,x2,norm,beta"
    assert lines[2] == "1,2,10,6"


def test_out_file(tmp_path, capsys):
    target = tmp_path / "beta.json"
    assert main(["beta", "2", "4", "--out", str(target)]) == EXIT_OK
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["records"][0]["beta"] == 105


def test_config_file_and_precedence(tmp_path, capsys):
    config = tmp_path / "run.cfg"
    config.write_text("# forced value\np-h=0.3\np_v=0.5\nformat=csv\n")
    result = run(capsys, ["exact", "--region", "1", "--x", "0,0", "--y", "0,0", "--config", str(config),
                          "--format", "json"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["value"] == pytest.approx(0.1225, rel=1e-12)
    assert result["document"]["header"]["config"]["p_h"] == "3/10"


def test_environment_overrides(monkeypatch, capsys):
    monkeypatch.setenv("PERCOLAB_SEED", "7")
    monkeypatch.setenv("PERCOLAB_N", "1000")
    result = run(capsys, ["mc"] + FORCED + ["--threads", "1"])
    assert result["code"] == EXIT_OK
    record = result["document"]["records"][0]
    assert record["seed"] == 7
    assert record["n"] == 1000


def test_config_file_beats_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("PERCOLAB_FORMAT", "json")
    config = tmp_path / "run.cfg"
    config.write_text("format=csv\n")
    result = run(capsys, ["beta", "1", "1", "--config", str(config)])
    assert result["raw"].startswith("# {")


def test_missing_config_file(capsys):
    assert main(["beta", "1", "1", "--config", "/nonexistent/run.cfg"]) == EXIT_USAGE


def test_unknown_command(capsys):
    assert main(["frobnicate"]) == EXIT_USAGE


def test_verify_detects_injected_fault(capsys):
    result = run(capsys, ["verify", "--fast", "--fault-inject", "beta", "--threads", "2"])
    assert result["code"] == EXIT_INVARIANT
    rows = result["document"]["records"]
    failed = {r["check"] for r in rows if not r["passed"]}
    assert any("beta" in name for name in failed)


def test_verify_clean_build_passes(capsys):
    result = run(capsys, ["verify", "--fast", "--threads", "2"])
    assert result["code"] == EXIT_OK
    rows = result["document"]["records"]
    assert len(rows) == 12
    assert all(r["passed"] for r in rows), [r for r in rows if not r["passed"]]
    assert {"beta oracle", "counting lemma", "ordering direction"} <= {r["check"] for r in rows}
