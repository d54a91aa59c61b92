import csv
import json
from pathlib import Path

import pytest

from maxwell_bloch.cli import COMMANDS, build_parser, main
from maxwell_bloch.config import load_config, parse_text
from maxwell_bloch.errors import InvalidParams

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_parse_full_example():
    cfg = parse_text("""
        # comment line
        Omega = 1.0
        omega1 = 0.0
        omega2 = 1.0
        gamma = 0.5   # trailing comment
        p = 1.0
        pump.carrier.re = 1.0
        pump.harmonic = [0.5, 0.0, 1.7]
        pump.harmonic = [0.0, 0.2, 3.0]
        t_end = 10
        initial.C1 = [0.6, 0.0]
        initial.A = 0.3
        p_list = [1e-2, 1e-3, 1e-4]
    """)
    assert cfg.params.gamma == 0.5
    assert cfg.pump.carrier == 1.0
    assert cfg.pump.harmonics == ((0.5, 1.7), (0.2j, 3.0))
    assert cfg.solver == {"t_end": 10}
    assert cfg.initial == {"C1": 0.6, "A": 0.3}
    assert cfg.experiment["p_list"] == [1e-2, 1e-3, 1e-4]


@pytest.mark.parametrize("text", [
    "bogus = 1",
    "p = 1\np = 2",
    "just a line",
    "pump.harmonic = [1, 2]",
    "Omega = 1\npump.harmonic = [1, 0, 1]",
])
def test_parse_errors(text):
    with pytest.raises(InvalidParams):
        parse_text(text)


def test_shipped_configs_load():
    for path in sorted(CONFIGS.glob("*.cfg")):
        load_config(path)


def test_parser_lists_all_commands():
    parser = build_parser()
    for name in COMMANDS:
        args = parser.parse_args([name])
        assert args.command == name
    assert len(COMMANDS) == 12


def test_harmonic_states_json_schema(tmp_path, capsys):
    assert main(["harmonic-states", "--config", str(CONFIGS / "stable.cfg"), "--out", str(tmp_path), "--json"]) == 0
    printed = json.loads(capsys.readouterr().out)
    written = json.loads((tmp_path / "harmonic_states.json").read_text())
    assert printed == written
    assert [rec["branch"] for rec in written] == ["NonZeroInvPlus", "NonZeroInvMinus"]
    keys = {"branch", "Mr", "Qr", "inversion", "alpha", "eigenvalues", "classification", "nu"}
    for rec in written:
        assert set(rec) == keys
        assert len(rec["Mr"]) == 2 and len(rec["eigenvalues"]) == 4
    assert written[0]["classification"] == "LinearlyStable"
    assert written[1]["nu"] is None


def test_simulate_full_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 0.1\np = 0.1\nt_end = 2\nsample_dt = 0.5\ninitial.C1 = 1.0\n")
    assert main(["simulate-full", "--config", str(cfg), "--out", str(tmp_path), "--csv", "--json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["experiment"] == "simulate-full"
    rows = list(csv.reader((tmp_path / "full.csv").open()))
    assert rows[0][0] == "t" and len(rows) == 6
    assert (tmp_path / "full.json").exists()


def test_simulate_reduced_csv(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("gamma = 0.1\np = 0.1\nt_end = 1\nsample_dt = 0.5\ninitial.Q = [0.5, 0.0]\n")
    assert main(["simulate-reduced", "--config", str(cfg), "--out", str(tmp_path), "--csv"]) == 0
    rows = list(csv.reader((tmp_path / "reduced.csv").open()))
    assert rows[1][3] == "N"


def test_library_error_gives_exit_code_two(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    assert main(["stability", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "unknown key" in capsys.readouterr().err
