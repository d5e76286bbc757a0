import json
import os

import pytest

import audeer

from pmvforge.core import utils
from pmvforge.core.cli import main
from pmvforge.core.montecarlo import read_scan
from pmvforge.core.oracles import InfluenceQuery
from pmvforge.core.settings import SettingFamily
from pmvforge.core.settings import toy_family
from pmvforge.core.settings import toy_setting


@pytest.fixture
def profile_file(tmpdir):
    path = audeer.path(tmpdir, "profile.txt")
    with open(path, "w") as fp:
        fp.write("# tie between 1 and 2\n1: 1>2>3\n1: 2>3>1\n")
    yield path


def write_pi(tmpdir, *vertices):
    path = audeer.path(tmpdir, "pi.json")
    utils.write_file(path, [list(pi) for pi in vertices])
    return path


def test_build(tmpdir, capsys):
    out = audeer.path(tmpdir, "family", "cm.json")
    assert main(["build", "CM", "borda", "--out", out]) == 0
    family = SettingFamily.from_dict(utils.read_file(out))
    assert family.problem == "CM"
    assert len(family) == 6
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 6
    for setting, line in zip(family, lines):
        assert line == (
            f"{setting.name}: "
            f"{len(setting.source.b)} source rows, "
            f"{len(setting.target.b)} target rows, "
            f"{len(setting.ops)} operations"
        )


def test_build_stdout(capsys):
    assert main(["build", "MoV", "plurality"]) == 0
    out = capsys.readouterr().out
    content = json.loads(out[out.index("{") :])
    assert SettingFamily.from_dict(content).q == 6


@pytest.mark.parametrize(
    "argv, error_msg",
    [
        (["build", "CML", "veto"], "Under veto"),
        (["build", "CM", "kemeny"], "'kemeny' is not a registered rule"),
        (
            ["build", "CCAV", "borda", "--d", "4"],
            "CCAV needs an alternative d in 1..3, not 4.",
        ),
    ],
)
def test_build_errors(capsys, argv, error_msg):
    assert main(argv) == 1
    assert error_msg in capsys.readouterr().err


def test_classify(tmpdir, capsys):
    assert main(["classify", "toy", "--n", "100", "--b", "1"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["case"] == "pt-sqrt-n"
    assert result["mode"] == "sup"
    out = audeer.path(tmpdir, "result.yaml")
    argv = ["classify", "toy", "--n", "100", "--b", "1", "--mode", "inf"]
    assert main(argv + ["--out", out]) == 0
    assert utils.read_file(out)["mode"] == "inf"


def test_classify_knife(tmpdir, capsys):
    pi = write_pi(tmpdir, ["2/5", "3/5"])
    argv = ["classify", "toy", "--pi", pi, "--n", "100", "--b", "10"]
    with pytest.warns(UserWarning, match="the case is not decided"):
        assert main(argv + ["--knife-band", "1/100"]) == 2
    result = json.loads(capsys.readouterr().out)
    assert result["subcase"] == "knife"


def test_classify_family_file(tmpdir, capsys):
    family = audeer.path(tmpdir, "toy.json")
    utils.write_file(family, toy_family().to_dict())
    setting = audeer.path(tmpdir, "setting.yaml")
    utils.write_file(setting, toy_setting().to_dict())
    for path in [family, setting]:
        assert main(["classify", path, "--n", "100", "--b", "1"]) == 0
        result = json.loads(capsys.readouterr().out)
        assert result["case"] == "pt-sqrt-n"


@pytest.mark.parametrize(
    "vertex, psi, case",
    [
        (["9/20", "11/20"], "1/10", "constant"),
        (["1/10", "9/10"], "1/10", "exponential"),
    ],
)
def test_classify_psi(tmpdir, capsys, vertex, psi, case):
    pi = write_pi(tmpdir, vertex)
    argv = ["classify", "toy", "--pi", pi, "--n", "100", "--psi", psi]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["case"] == case


def test_config_file(tmpdir, capsys):
    assert main(["classify", "toy"]) == 1
    assert "'classify' needs the number of voters --n." in capsys.readouterr().err
    config = audeer.path(tmpdir, "config.yaml")
    utils.write_file(config, {"n": 100, "b": 1, "knife-band": "1/100"})
    assert main(["--config", config, "classify", "toy"]) == 0
    assert json.loads(capsys.readouterr().out)["case"] == "pt-sqrt-n"
    # command line wins over the file
    argv = ["--config", config, "classify", "toy", "--b", "0", "--n", "11"]
    assert main(argv) == 0
    assert json.loads(capsys.readouterr().out)["case"] == "zero"
    utils.write_file(config, [1, 2])
    assert main(["--config", config, "classify", "toy"]) == 1
    assert "must hold a mapping" in capsys.readouterr().err


def test_estimate(tmpdir, capsys):
    argv = ["estimate", "toy", "--n", "20", "--b", "1", "--trials", "200"]
    assert main(argv) == 0
    header, row = capsys.readouterr().out.splitlines()
    assert header.split(",")[:4] == ["n", "B", "psi", "trials"]
    assert row.startswith("20,1,0,200,")
    out = audeer.path(tmpdir, "estimate.csv")
    assert main(argv + ["--seed", "3", "--out", out]) == 0
    (result,) = read_scan(out)
    assert result.seed == 3
    assert result.setting == "toy"


def test_estimate_sup(tmpdir, capsys):
    pi = write_pi(tmpdir, ["1/4", "3/4"], ["3/4", "1/4"])
    argv = ["estimate", "toy", "--pi", pi, "--n", "10", "--trials", "100"]
    assert main(argv) == 0
    _, row = capsys.readouterr().out.splitlines()
    assert row.startswith("10,1,0,")


def test_estimate_predicates(tmpdir, capsys):
    family = audeer.path(tmpdir, "mov.json")
    assert main(["build", "MoV", "plurality", "--out", family]) == 0
    capsys.readouterr()
    argv = ["estimate", family, "--n", "4", "--trials", "40", "--seed", "1"]
    assert main(argv) == 0
    _, membership = capsys.readouterr().out.splitlines()
    assert main(argv + ["--predicate", "oracle", "--caps", "n=4"]) == 0
    _, oracle = capsys.readouterr().out.splitlines()
    assert membership == oracle
    assert main(argv + ["--predicate", "oracle", "--caps", "n=3"]) == 1
    assert "Error:" in capsys.readouterr().err


def test_estimate_priced_predicates(tmpdir, capsys):
    prices = audeer.path(tmpdir, "prices.yaml")
    utils.write_file(
        prices,
        {"change": {"default": 10, "2>1>3 -> 2>3>1": 1, "2>3>1 -> 1>2>3": 1}},
    )
    family = audeer.path(tmpdir, "cb.json")
    argv = ["build", "CB", "plurality", "--d", "1", "--prices", prices]
    assert main(argv + ["--out", family]) == 0
    capsys.readouterr()
    assert SettingFamily.from_dict(utils.read_file(family)).prices is not None
    for budget in ["2", "10"]:
        argv = ["estimate", family, "--n", "3", "--b", budget, "--trials", "60"]
        assert main(argv) == 0
        _, membership = capsys.readouterr().out.splitlines()
        assert main(argv + ["--predicate", "oracle"]) == 0
        _, oracle = capsys.readouterr().out.splitlines()
        assert membership == oracle


def test_estimate_errors(capsys):
    argv = ["estimate", "toy", "--n", "10", "--predicate", "oracle"]
    assert main(argv) == 1
    assert "Family 'toy' has no rule to run oracles." in capsys.readouterr().err
    argv = ["estimate", "toy", "--n", "10", "--caps", "n12"]
    assert main(argv + ["--predicate", "oracle"]) == 1
    assert main(["estimate", "missing.json", "--n", "10"]) == 1
    assert "Error:" in capsys.readouterr().err


def test_scan_and_fit(tmpdir, capsys):
    out = audeer.path(tmpdir, "scan.csv")
    argv = ["scan", "toy", "--n", "10,20,40", "--b", "1", "--trials", "400"]
    assert main(argv + ["--out", out]) == 0
    assert capsys.readouterr().out == ""
    assert [r.n for r in read_scan(out)] == [10, 20, 40]
    fit = audeer.path(tmpdir, "fit.json")
    assert main(["fit", out, "--floor", "10", "--out", fit]) == 0
    result = utils.read_file(fit)
    assert result["axis"] == "n"
    assert result["num_points"] == 3
    assert -0.9 < result["slope"] < -0.1
    assert main(["fit", out, "--floor", "100000"]) == 1
    assert "at least 3 points" in capsys.readouterr().err


def test_scan_stdout(capsys):
    argv = ["scan", "toy", "--n", "10", "--b", "0,1", "--trials", "50"]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 3


def test_scan_errors(tmpdir, capsys):
    pi = write_pi(tmpdir, ["1/4", "3/4"], ["3/4", "1/4"])
    assert main(["scan", "toy", "--pi", pi, "--n", "10"]) == 1
    assert "Scans need a single distribution." in capsys.readouterr().err
    assert main(["fit", audeer.path(tmpdir, "missing.csv")]) == 1


def test_oracle(tmpdir, capsys, profile_file):
    assert main(["oracle", "MoV", "plurality", profile_file, "--b", "1"]) == 0
    answer = json.loads(capsys.readouterr().out)
    assert answer["success"]
    assert answer["witness"]["cost"] == "1"
    assert sum(answer["witness"]["removed"]) == 1
    assert main(["oracle", "MoV", "plurality", profile_file, "--b", "0"]) == 0
    assert json.loads(capsys.readouterr().out) == {"success": False}
    out = audeer.path(tmpdir, "answer.json")
    argv = ["oracle", "CB", "borda", profile_file, "--d", "3", "--out", out]
    assert main(argv) == 0
    assert "success" in utils.read_file(out)
    assert os.path.exists(out)


@pytest.mark.parametrize(
    "extra, error_msg",
    [
        (["--caps", "n=1"], "Error:"),
        (["--caps", "n"], "Invalid cap 'n', expected e.g. 'n=12'."),
    ],
)
def test_oracle_errors(capsys, profile_file, extra, error_msg):
    assert main(["oracle", "MoV", "plurality", profile_file] + extra) == 1
    assert error_msg in capsys.readouterr().err


def test_undetermined(capsys, monkeypatch, profile_file):
    from pmvforge.core.lp import SearchExhaustedError

    def exhausted(self, **kwargs):
        raise SearchExhaustedError("Search stopped after 0 nodes.")

    monkeypatch.setattr(InfluenceQuery, "run", exhausted)
    assert main(["oracle", "CB", "borda", profile_file, "--d", "3"]) == 2
    assert "Undetermined: Search stopped" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["oracle", "e-CM", "plurality", "profile.txt"],
        ["classify", "toy", "--n", "10", "--mode", "bogus"],
        ["scan", "toy", "--unknown"],
    ],
)
def test_usage(capsys, argv):
    # exit code 2 stays reserved for undetermined results
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 1
    assert "usage: pmvforge" in capsys.readouterr().err


def test_help(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--help"])
    assert excinfo.value.code == 0
    assert "classify" in capsys.readouterr().out
