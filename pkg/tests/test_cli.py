import json
from pathlib import Path

import pytest

from screenlab.cli import main
from screenlab.report import exact_decimal, fmt, text_table

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
F = __import__("fractions").Fraction


def test_rational_formatting():
    assert fmt(F(13949, 50)) == "13949/50 (278.98)"
    assert fmt(F(1, 3)) == "1/3"
    assert fmt(F(4)) == "4"
    assert exact_decimal(F(-1, 8)) == "-0.125"
    assert exact_decimal(F(1, 7)) is None
    table = text_table(("a", "bb"), [(1, F(1, 2))])
    assert table.splitlines()[2] == "1  1/2 (0.5)"


def test_solve_menu_writes_seeded_artifacts(tmp_path, capsys):
    assert main(["solve-menu", "--scenario", str(SCENARIOS / "example1.json"), "--out", str(tmp_path), "--seed", "7"]) == 0
    menu = (tmp_path / "menu.csv").read_text().splitlines()
    assert menu[0] == "# seed: 7"
    assert menu[2].startswith("1,99/100,1/20 (0.05),98,98,376,13949/50 (278.98)")
    assert (tmp_path / "constraints.csv").exists()
    assert "robust: True" in capsys.readouterr().out


def test_single_type_menu(tmp_path):
    d = json.loads((SCENARIOS / "oracle-two-type.json").read_text())
    d["belief"] = {"message": {"min_index": 1, "max_index": 2}, "probs": {"2": "1"}}
    path = tmp_path / "one.json"
    path.write_text(json.dumps(d))
    assert main(["solve-menu", "--scenario", str(path), "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "menu.csv").read_text().splitlines()[2:]
    assert len(rows) == 1


def test_invalid_value_function_is_reported(capsys):
    assert main(["solve-menu", "--scenario", str(SCENARIOS / "convex-value.json")]) == 2
    assert "property 3 strictly concave: FAIL" in capsys.readouterr().out


def test_oracle_check_fixture_and_guard(capsys):
    assert main(["oracle-check", "--scenario", str(SCENARIOS / "oracle-two-type.json")]) == 0
    assert "verdict: match" in capsys.readouterr().out
    assert main(["oracle-check", "--scenario", str(SCENARIOS / "example1.json")]) == 2
    assert "oracle limit" in capsys.readouterr().out


def test_oracle_self_test_detects_fault(capsys):
    assert main(["oracle-check", "--self-test", "--count", "5", "--seed", "1"]) == 0
    assert "detected in every case" in capsys.readouterr().out


def test_rationalize_is_deterministic(tmp_path):
    args = ["rationalize", "--scenario", str(SCENARIOS / "three-type-low.json"), "--seed", "3"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
        assert "seed: 3" in f.read_text().splitlines()[0]


def test_level_cap_without_fixed_point_fails(capsys):
    assert main(["rationalize", "--scenario", str(SCENARIOS / "three-type-high.json"), "--levels", "3"]) == 1
    assert "no fixed point within 3 levels" in capsys.readouterr().out


@pytest.mark.parametrize("name", ["example1", "three-type-high", "three-type-low"])
def test_reproduce_targets(name, tmp_path):
    assert main(["reproduce", name, "--out", str(tmp_path)]) == 0


def test_weights_override_changes_the_run(capsys):
    assert main(["rationalize", "--scenario", str(SCENARIOS / "three-type-high.json"), "--weights", "1"]) == 0
    assert "W=1" in capsys.readouterr().out


def test_suite_subset_writes_json(tmp_path):
    assert main(["suite", "--only", "truncation", "--seed", "5", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "suite.json").read_text())
    assert data["seed"] == 5 and data["passed"]
    assert data["suites"][0]["cases"] == 100
