from __future__ import annotations

import csv
import json
from fractions import Fraction

import numpy as np
import pytest

from horolip import cli
from horolip.errors import PreconditionError
from horolip.nctorus import Cocycle, random_element
from horolip.report import Report, RunConfig, csv_text, dumps, to_plain


def test_runconfig_validation():
    with pytest.raises(PreconditionError):
        RunConfig(truncation_tol=0)
    with pytest.raises(PreconditionError):
        RunConfig(run_length=-1)
    with pytest.raises(PreconditionError):
        RunConfig(window_radius=0)
    with pytest.raises(PreconditionError):
        RunConfig(seed=2**64)
    cfg = RunConfig.from_json({"generating_set": [1, 2], "radius": 7})
    assert cfg.extra == {"radius": 7}
    assert cfg.oracle()((5,)) == 3


def test_runconfig_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PreconditionError):
        RunConfig.load(bad)
    with pytest.raises(PreconditionError):
        RunConfig.load(tmp_path / "missing.json")


def test_to_plain():
    assert to_plain({(1, 2): Fraction(1, 2), "n": np.int64(3)}) == {"(1, 2)": "1/2", "n": 3}
    assert to_plain(Fraction(4, 2)) == 2
    assert to_plain(float("inf")) == "inf"
    assert to_plain(1 + 2j) == [1.0, 2.0]
    assert to_plain({3, 1, 2}) == [1, 2, 3]
    assert to_plain(np.array([[1, 2]])) == [[1, 2]]


def test_report_and_json_are_deterministic():
    rep = Report("x", {"b": 1, "a": 2})
    rep.check("one", 1, "<=", 2, True)
    assert rep.passed
    rep.check("two", 3, "<=", 2, False)
    assert not rep.passed
    assert dumps(rep) == dumps(rep)
    assert list(json.loads(dumps(rep))) == sorted(json.loads(dumps(rep)))
    text = csv_text(["k", "v"], [(1, (2, 3))])
    assert list(csv.reader(text.splitlines())) == [["k", "v"], ["1", "[2, 3]"]]


def write_cfg(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


@pytest.mark.parametrize("cmd,data", [
    ("length-table", {"generating_set": [3, 8], "radius": 6}),
    ("facets", {"generating_set": [[1, 0], [0, 1], [1, 1]]}),
    ("boundary", {"generating_set": [1], "census_radius": 10, "expected_census": 2}),
    ("radius", {"generating_set": [1], "samples": 4, "R_max": 6}),
    ("freegroup", {}),
])
def test_cli_commands_pass(tmp_path, capsys, cmd, data):
    cfg = write_cfg(tmp_path, data)
    assert cli.run([cmd, "--config", cfg]) == 0
    first = capsys.readouterr().out
    assert json.loads(first)["passed"] is True
    assert cli.run([cmd, "--config", cfg]) == 0
    assert capsys.readouterr().out == first


def test_cli_writes_output_files(tmp_path):
    out = tmp_path / "out"
    cfg = write_cfg(tmp_path, {"generating_set": [1, 2], "radius": 5})
    assert cli.run(["length-table", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "length-table.json").exists()
    assert any(p.suffix == ".csv" for p in out.iterdir())


def test_cli_seminorm_element(tmp_path, capsys):
    f = random_element(np.random.default_rng(4), Cocycle.trivial(1), 2)
    el = write_cfg(tmp_path, f.to_json(), "el.json")
    cfg = write_cfg(tmp_path, {"generating_set": [1, 2]})
    assert cli.run(["seminorm", "--config", cfg, "--element", el]) == 0
    capsys.readouterr()
    # the element is required
    assert cli.run(["seminorm", "--config", cfg]) == 2


def test_cli_config_errors(tmp_path):
    assert cli.run([]) == 2
    assert cli.run(["length-table", "--config", str(tmp_path / "nope.json")]) == 2
    assert cli.run(["length-table", "--seed", "-1"]) == 2
    with pytest.raises(SystemExit):
        cli.run(["no-such-command"])


def test_cli_list(capsys):
    assert cli.run(["--list"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 15


def test_accept_single_check_and_failure_injection(capsys):
    assert cli.run(["accept", "--check", "1"]) == 0
    assert "criterion 1 census-pm1: PASS" in capsys.readouterr().err
    assert cli.run(["accept", "--check", "3"]) == 0
    capsys.readouterr()
    # scaling sigma_F breaks the Busemann identity, so the run must fail
    assert cli.run(["accept", "--check", "3", "--perturb-sigma", "2"]) == 1
    assert "FAIL" in capsys.readouterr().err
