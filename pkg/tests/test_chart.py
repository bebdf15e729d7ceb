"""SVG rendering of sweep CSVs: series grouping, determinism, error paths."""

import io
import xml.etree.ElementTree as ET

import pytest

from swarmtask.config import ExperimentConfig
from swarmtask.chart import ChartError, read_rows, render_chart, emit_chart
from swarmtask.sweep import SweepSpec, run_sweep, write_csv

BASE = ExperimentConfig(algo="rw", m=12, n=12, follower_count=4,
                        lambda_inv=300.0, rounds=80, trials=2,
                        master_seed=4242)


def _sweep_csv(tmp_path, algos=("rw", "prop", "dl", "hybrid"), means=True):
    spec = SweepSpec(base=BASE, parameter="lambda_inv",
                     values=(200.0, 400.0), algos=algos)
    results = run_sweep(spec)
    path = tmp_path / "results.csv"
    buf = io.StringIO()
    write_csv(results, buf, means=means)
    path.write_text(buf.getvalue())
    return path, results


def test_chart_has_one_series_per_algorithm(tmp_path):
    path, _ = _sweep_csv(tmp_path)
    svg = render_chart(read_rows(str(path)), "lambda_inv", "mu_unsatisfied")
    assert svg.count("<polyline") == 4
    # mixing parameters that differ across series become part of the label
    for label in (">rw<", ">prop<", ">dl p_prop=0.6<", ">hybrid t_rw=50<"):
        assert label in svg
    root = ET.fromstring(svg)
    assert root.tag.endswith("svg")


def test_chart_recomputes_means_ignoring_mean_rows(tmp_path):
    path, results = _sweep_csv(tmp_path)
    with_means = render_chart(read_rows(str(path)), "lambda_inv",
                              "mu_unsatisfied")
    bare = tmp_path / "bare.csv"
    buf = io.StringIO()
    write_csv(results, buf, means=False)
    bare.write_text(buf.getvalue())
    without_means = render_chart(read_rows(str(bare)), "lambda_inv",
                                 "mu_unsatisfied")
    assert with_means == without_means

    # a poisoned aggregate row must not move any point
    poisoned = tmp_path / "poisoned.csv"
    rows = path.read_text().splitlines()
    fake = rows[-1].split(",")
    fake[6], fake[7] = "mean", "999999"
    poisoned.write_text("\n".join(rows + [",".join(fake)]) + "\n")
    assert render_chart(read_rows(str(poisoned)), "lambda_inv",
                        "mu_unsatisfied") == with_means


def test_chart_output_is_deterministic(tmp_path):
    path, _ = _sweep_csv(tmp_path)
    rows = read_rows(str(path))
    assert render_chart(rows, "lambda_inv", "mu_unsatisfied") == \
           render_chart(rows, "lambda_inv", "mu_unsatisfied")


def test_emit_chart_writes_parseable_svg(tmp_path):
    path, _ = _sweep_csv(tmp_path, algos=("rw", "prop"))
    out = tmp_path / "fig.svg"
    emit_chart(str(path), "lambda_inv", "mu_completion", str(out))
    tree = ET.parse(out)
    assert tree.getroot().tag.endswith("svg")


def test_single_point_series_renders(tmp_path):
    spec = SweepSpec(base=BASE, parameter="lambda_inv", values=(250.0,),
                     algos=("rw",))
    buf = io.StringIO()
    write_csv(run_sweep(spec), buf)
    path = tmp_path / "one.csv"
    path.write_text(buf.getvalue())
    svg = render_chart(read_rows(str(path)), "lambda_inv", "mu_unsatisfied")
    ET.fromstring(svg)
    assert "<circle" in svg          # markers survive even without a line


def test_unknown_column_rejected(tmp_path):
    path, _ = _sweep_csv(tmp_path, algos=("rw",))
    rows = read_rows(str(path))
    with pytest.raises(ChartError) as err:
        render_chart(rows, "lambda_inv", "mu_speed")
    assert "mu_speed" in str(err.value)
    with pytest.raises(ChartError):
        render_chart(rows, "voltage", "mu_unsatisfied")


def test_empty_and_non_numeric_inputs_rejected(tmp_path):
    with pytest.raises(ChartError):
        render_chart([], "lambda_inv", "mu_unsatisfied")
    bad = tmp_path / "bad.csv"
    bad.write_text("algo,lambda_inv,seed,mu_unsatisfied\nrw,fast,1,2.0\n")
    with pytest.raises(ChartError):
        render_chart(read_rows(str(bad)), "lambda_inv", "mu_unsatisfied")


def test_missing_metric_rows_are_skipped_not_fatal(tmp_path):
    # completion can be absent for some trials; those rows drop out and the
    # series is built from the rest
    text = ("algo,lambda_inv,p_prop,t_rw,i_p,t_p,seed,"
            "mu_unsatisfied,mu_completion,tasks_spawned,tasks_completed\n"
            "rw,300,,,2,3,7,4.0,,3,0\n"
            "rw,300,,,2,3,8,5.0,2.5,4,1\n"
            "rw,600,,,2,3,7,6.0,3.5,5,2\n")
    path = tmp_path / "partial.csv"
    path.write_text(text)
    svg = render_chart(read_rows(str(path)), "lambda_inv", "mu_completion")
    ET.fromstring(svg)
    assert svg.count("<polyline") == 1