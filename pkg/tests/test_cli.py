import argparse
import json
import math
from pathlib import Path

import pytest

from robinlayer import cli
from robinlayer.errors import NumericalError

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_model1d_example(capsys):
    code, out, _ = run(capsys, "model1d", "--alpha", 5, "--delta", 2)
    rec = json.loads(out)
    assert code == 0 and -25 < rec["E"] < -25 + 1e-6 and rec["end"] == "dirichlet"


def test_curve_info_example(capsys):
    code, out, _ = run(capsys, "curve", "--preset", "circle", "--R", 1, "--n", 256, "info")
    assert code == 0 and abs(json.loads(out)["L"] - 2 * math.pi) <= 1e-9


def test_predict_harmonic_example(capsys):
    code, out, _ = run(capsys, "predict", "harmonic", "--mu", 2, "--mu", 8, "--count", 4)
    assert code == 0 and out.strip() == "3,5,7,7"


def test_predict_degenerate(capsys):
    code, out, _ = run(capsys, "predict", "degenerate", "--p", 2, "--Cp", 1, "--count", 2)
    vals = [float(v) for v in out.strip().split(",")]
    assert code == 0 and 1.059 <= vals[0] <= 1.061 and vals[1] > vals[0]


def test_oracle_disk(capsys):
    code, out, _ = run(capsys, "oracle", "disk", "--R", 1, "--alpha", 10, "--m", 0)
    assert code == 0 and json.loads(out)["E"] == pytest.approx(-110.528089, abs=1e-5)


def test_curve_csv_header(capsys):
    code, out, _ = run(capsys, "curve", "--preset", "ellipse", "--n", 64, "csv")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "s,x,y,kappa" and len(lines) == 65


def test_effective_csv(capsys):
    code, out, _ = run(capsys, "effective", "--preset", "circle", "--n", 128, "--alpha", 4, "-k", 3)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "alpha,j,eigenvalue" and len(lines) == 4
    assert float(lines[1].split(",")[2]) == pytest.approx(-4.0, abs=1e-8)


def test_bands_csv_and_gaps(capsys, tmp_path):
    gaps = tmp_path / "g.json"
    code, out, _ = run(capsys, "bands", "--cell", "cosine", "--n", 128, "--alpha", 0, "--thetas", 17, "--j-max", 2, "--gaps", gaps)
    assert code == 0 and out.splitlines()[0] == "theta,j,epsilon"
    rows = out.splitlines()[1:]
    # two bands per phase; an odd count gets pi added as an extra phase
    assert len(rows) % 2 == 0 and len(rows) >= 34
    assert json.loads(gaps.read_text())["gaps"] == []


def test_bracket_csv(capsys):
    code, out, _ = run(capsys, "bracket", "--preset", "circle", "--n", 64, "--alpha", 8, "--nt", 16)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "alpha,delta,j,lower,upper,midpoint,halfwidth"
    lo, hi = (float(v) for v in lines[1].split(",")[3:5])
    assert lo <= hi


def test_config_and_flags_agree(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('alpha = 7.0\nk = 2\n[curve]\nkind = "ellipse"\na = 2.0\nb = 1.0\nn = 128\n')
    _, from_file, _ = run(capsys, "effective", "--config", cfg)
    _, from_flags, _ = run(capsys, "effective", "--preset", "ellipse", "--a", 2, "--b", 1, "--n", 128, "--alpha", 7, "-k", 2)
    assert from_file == from_flags


def test_flags_override_config(capsys, tmp_path):
    cfg = tmp_path / "c.toml"
    cfg.write_text('alpha = 7.0\n[curve]\nkind = "circle"\nR = 1.0\nn = 128\n')
    _, out, _ = run(capsys, "effective", "--config", cfg, "--alpha", 3, "--R", 2)
    # circle of radius 2 has curvature 1/2
    assert float(out.splitlines()[1].split(",")[2]) == pytest.approx(-1.5, abs=1e-8)


def test_json_config_accepted(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"kind": "circle", "R": 1.0, "n": 64}))
    code, out, _ = run(capsys, "curve", "--config", cfg, "info")
    assert code == 0 and json.loads(out)["n"] == 64


def test_shipped_configs_load(capsys):
    code, out, _ = run(capsys, "curve", "--config", CONFIGS / "ellipse.toml", "info")
    assert code == 0 and json.loads(out)["kappa_max"] == pytest.approx(2.0)
    code, out, _ = run(capsys, "bands", "--config", CONFIGS / "cosine_cell.toml", "--n", 64, "--thetas", 17, "--j-max", 2)
    assert code == 0 and out.startswith("theta,j,epsilon")


@pytest.mark.parametrize(
    "argv",
    [
        ["model1d", "--alpha", "1", "--delta", "0.5"],
        ["model1d", "--alpha", "5"],
        ["curve", "--preset", "hexagon", "info"],
        ["curve", "info"],
        ["effective", "--preset", "circle"],
        ["bracket", "--preset", "circle", "--alpha", "10", "--delta", "0.6"],
        ["predict", "harmonic"],
        ["curve", "--config", "/nonexistent/x.toml", "info"],
        ["frobnicate"],
        ["model1d", "--alpha", "5", "--delta", "2", "--bogus"],
        ["curve", "--set", "novalue", "--preset", "circle", "info"],
    ],
)
def test_validation_exit_code(capsys, argv):
    assert cli.main(argv) == 2


def test_numerical_failure_exit_code(capsys, monkeypatch):
    def boom(args, cfg):
        raise NumericalError("no convergence")

    monkeypatch.setitem(cli.COMMANDS, "model1d", boom)
    code, _, err = run(capsys, "model1d", "--alpha", 5, "--delta", 2)
    assert code == 3 and "numerical failure" in err


def _subparsers(parser):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices
    return {}


def test_help_lists_every_flag(capsys):
    parser = cli.build_parser()
    subs = _subparsers(parser)
    assert set(subs) == set(cli.SUBCOMMANDS)
    for name, sp in subs.items():
        text = sp.format_help()
        for action in sp._actions:
            for opt in action.option_strings:
                assert opt in text, f"{name}: {opt} missing from --help"
            if action.option_strings and not isinstance(action, argparse._HelpAction):
                assert action.help, f"{name}: {action.option_strings} undocumented"
    assert cli.main(["model1d", "--help"]) == 0


def test_sweep_plan(capsys, tmp_path):
    plan = tmp_path / "plan.toml"
    plan.write_text('alphas = [6.0, 9.0]\nn_s = 64\nn_t = 16\noutput_dir = "res"\n[curve]\nkind = "circle"\n')
    code, out, _ = run(capsys, "sweep", "--plan", plan)
    assert code == 0 and out.splitlines()[0].startswith("alpha,delta,j,lower")
    assert {"sweep.csv", "sweep.json", "remainder.svg"} <= {p.name for p in (tmp_path / "res").iterdir()}
    first = (tmp_path / "res" / "sweep.csv").read_bytes()
    code, again, _ = run(capsys, "sweep", "--plan", plan, "--output-dir", tmp_path / "res2")
    assert again == out and (tmp_path / "res2" / "sweep.csv").read_bytes() == first


def test_gap_sweep_with_budget_from(capsys, tmp_path):
    sweep = tmp_path / "sweep.csv"
    sweep.write_text("alpha,delta,j,lower,upper,midpoint,halfwidth,effective,remainder,predicted\n10.0,0.2,1,-1.0,1.0,0.0,1.0,0.0,0.5,0.0\n")
    plan = tmp_path / "gaps.toml"
    plan.write_text(
        'alphas = [100.0, 400.0]\nbudget_from = "sweep.csv"\ntheta_count = 17\nj_max = 2\noutput_dir = "g"\n'
        '[cell]\nkind = "cosine"\nn = 128\n'
    )
    code, out, _ = run(capsys, "sweep", "--plan", plan)
    assert code == 0 and out.splitlines()[0] == "alpha,gap,lower,upper,length,certified"
    doc = json.loads((tmp_path / "g" / "gaps.json").read_text())
    assert doc["budget"] == 1.0
    assert (tmp_path / "g" / "gap_lengths.svg").exists()


def test_out_flag_writes_file(capsys, tmp_path):
    dest = tmp_path / "m.json"
    code, out, _ = run(capsys, "model1d", "--alpha", 5, "--delta", 2, "--out", dest)
    assert code == 0 and out == "" and json.loads(dest.read_text())["alpha"] == 5.0


def test_repeated_runs_identical(capsys):
    argv = ["effective", "--preset", "ellipse", "--n", 256, "--alpha", 50, "-k", 3, "--seed", 4]
    assert run(capsys, *argv)[1] == run(capsys, *argv)[1]
