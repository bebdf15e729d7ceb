"""Command line behavior: the three subcommands and their failure modes."""

import xml.etree.ElementTree as ET

import pytest

from swarmtask.cli import main
from swarmtask.sweep import CSV_HEADER

QUICK = """
algo = prop
m = 12
n = 12
follower_count = 4
lambda_inv = 300
rounds = 60
trials = 2
master_seed = 777
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "quick.cfg"
    path.write_text(QUICK)
    return str(path)


def _rows(text):
    lines = [l for l in text.strip().splitlines() if l]
    return [l.split(",") for l in lines]


def test_run_writes_csv_to_stdout(config_file, capsys):
    assert main(["run", "--config", config_file]) == 0
    rows = _rows(capsys.readouterr().out)
    assert rows[0] == list(CSV_HEADER)
    assert len(rows) == 1 + 2 + 1                  # trials + mean
    assert [r[0] for r in rows[1:]] == ["prop"] * 3
    assert rows[3][6] == "mean"


def test_run_seed_override_changes_trials(config_file, capsys):
    main(["run", "--config", config_file])
    first = capsys.readouterr().out
    main(["run", "--config", config_file, "--seed", "778"])
    second = capsys.readouterr().out
    main(["run", "--config", config_file, "--seed", "777"])
    third = capsys.readouterr().out
    assert first == third                          # 777 is the file's seed
    assert first != second
    assert _rows(first)[1][6] != _rows(second)[1][6]


def test_run_writes_file(config_file, tmp_path, capsys):
    out = tmp_path / "res.csv"
    assert main(["run", "--config", config_file, "--out", str(out)]) == 0
    assert capsys.readouterr().out == ""
    assert _rows(out.read_text())[0] == list(CSV_HEADER)


def test_run_rejects_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("algo = dl\n")                  # p_prop missing
    assert main(["run", "--config", str(bad)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("error:") and "p_prop" in err


def test_run_missing_file_is_a_diagnostic_not_a_crash(capsys):
    assert main(["run", "--config", "/nonexistent/exp.cfg"]) == 2
    assert "error:" in capsys.readouterr().err


def test_sweep_param_crossing(config_file, tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    rc = main(["sweep", "--param", "lambda_inv", "--values", "300,600",
               "--algos", "prop,rw", "--config", config_file,
               "--trials", "1", "--out", str(out)])
    assert rc == 0
    rows = _rows(out.read_text())
    # 4 cells x 1 trial + 4 mean rows, ordered algo then value
    cells = [(r[0], r[1]) for r in rows[1:] if r[6] != "mean"]
    assert cells == [("prop", "300"), ("prop", "600"),
                     ("rw", "300"), ("rw", "600")]
    assert "trials" in capsys.readouterr().err     # progress goes to stderr


def test_sweep_default_algos_follow_param(config_file, tmp_path):
    out = tmp_path / "dl.csv"
    rc = main(["sweep", "--param", "p_prop", "--values", "0.0,0.5,1.0",
               "--config", config_file, "--trials", "1", "--out", str(out)])
    assert rc == 0
    rows = _rows(out.read_text())
    assert {r[0] for r in rows[1:]} == {"dl"}
    assert [r[2] for r in rows[1:] if r[6] != "mean"] == ["0", "0.5", "1"]


def test_sweep_requires_exactly_one_mode(config_file, capsys):
    assert main(["sweep", "--config", config_file]) == 2
    assert main(["sweep", "--preset", "fig3", "--param", "lambda_inv",
                 "--config", config_file]) == 2
    err = capsys.readouterr().err
    assert "exactly one" in err


def test_sweep_param_requires_values(config_file, capsys):
    assert main(["sweep", "--param", "lambda_inv",
                 "--config", config_file]) == 2
    assert "--values" in capsys.readouterr().err


def test_sweep_unknown_preset_rejected_by_parser(config_file, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--preset", "fig8", "--config", config_file])
    assert exc.value.code == 2
    assert "--preset" in capsys.readouterr().err


def test_plot_renders_sweep_output(config_file, tmp_path):
    csv_path = tmp_path / "sweep.csv"
    svg_path = tmp_path / "fig.svg"
    main(["sweep", "--param", "lambda_inv", "--values", "300,600",
          "--algos", "rw,prop", "--config", config_file, "--trials", "1",
          "--out", str(csv_path)])
    rc = main(["plot", "--in", str(csv_path), "--x", "lambda_inv",
               "--metric", "mu_unsatisfied", "--out", str(svg_path)])
    assert rc == 0
    assert ET.parse(svg_path).getroot().tag.endswith("svg")


def test_plot_unknown_metric_fails_cleanly(config_file, tmp_path, capsys):
    csv_path = tmp_path / "sweep.csv"
    main(["sweep", "--param", "lambda_inv", "--values", "300",
          "--algos", "rw", "--config", config_file, "--trials", "1",
          "--out", str(csv_path)])
    svg_path = tmp_path / "fig.svg"
    assert main(["plot", "--in", str(csv_path), "--x", "lambda_inv",
                 "--metric", "latency", "--out", str(svg_path)]) == 2
    assert "latency" in capsys.readouterr().err