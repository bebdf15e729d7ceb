"""Command line interface.

    swarmtask run --config exp.cfg [--seed N] [--out results.csv]
    swarmtask sweep --preset fig3 [--trials N] [--seed N] [--out results.csv]
    swarmtask sweep --param lambda_inv --values 3e4,5e4,9e4 --algos rw,prop
    swarmtask plot --in results.csv --x lambda_inv --metric mu_completion \
        --out fig.svg

run executes the trials of one configuration; sweep crosses a parameter
with a list of algorithms (or expands a named preset); both write the same
CSV schema, to stdout unless --out is given.  plot renders a sweep CSV to a
static SVG.  Exit status is 0 on success and 2 with a diagnostic on any
validation or I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from .chart import ChartError, emit_chart
from .config import (ALGOS, ConfigError, ExperimentConfig, _coerce,
                     parse_config)
from .engine import run_trial
from .sweep import (PRESETS, SweepError, SweepSpec, emit_csv, preset_specs,
                    run_sweep, trial_seeds, write_csv)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swarmtask",
        description="grid-world task allocation simulator and experiment "
                    "harness")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one configuration's trials")
    p_run.add_argument("--config", required=True,
                       help="key=value config file (field names as keys)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override master_seed")
    p_run.add_argument("--out", default=None,
                       help="CSV path (default: stdout)")

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    p_sweep.add_argument("--preset", choices=sorted(PRESETS), default=None,
                         help="named experiment design")
    p_sweep.add_argument("--param", default=None,
                         help="config field to sweep")
    p_sweep.add_argument("--values", default=None,
                         help="comma-separated values for --param")
    p_sweep.add_argument("--algos", default=None,
                         help="comma-separated algorithms (default depends "
                              "on --param)")
    p_sweep.add_argument("--config", default=None,
                         help="base config file for every cell")
    p_sweep.add_argument("--trials", type=int, default=None,
                         help="override trials per cell")
    p_sweep.add_argument("--seed", type=int, default=None,
                         help="override master_seed")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="worker threads (output is identical for any "
                              "value)")
    p_sweep.add_argument("--out", default=None,
                         help="CSV path (default: stdout)")

    p_plot = sub.add_parser("plot", help="render a sweep CSV as SVG")
    p_plot.add_argument("--in", dest="infile", required=True,
                        help="sweep CSV to read")
    p_plot.add_argument("--x", required=True, help="x-axis parameter column")
    p_plot.add_argument("--metric", required=True,
                        help="metric column to average per series")
    p_plot.add_argument("--out", required=True, help="SVG output path")
    return parser


def _write_results(results, out: Optional[str]) -> None:
    if out is None:
        write_csv(results, sys.stdout)
    else:
        emit_csv(results, out)


def _cmd_run(args) -> int:
    overrides = {} if args.seed is None else {"master_seed": args.seed}
    config = parse_config(args.config, overrides)
    results = []
    for seed in trial_seeds(config.master_seed, config.trials):
        results.append(run_trial(config, seed))
    _write_results(results, args.out)
    return 0


def _default_algos(param: str) -> tuple:
    if param == "p_prop":
        return ("dl",)
    if param == "t_rw":
        return ("hybrid",)
    return ALGOS


def _sweep_specs(args) -> List[SweepSpec]:
    if (args.preset is None) == (args.param is None):
        raise ConfigError("preset", "give exactly one of --preset or --param")
    if args.config is not None:
        base = parse_config(args.config)
    else:
        base = ExperimentConfig(algo="rw")
    if args.seed is not None:
        base = base.replaced(master_seed=args.seed)
    if args.trials is not None:
        if args.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        base = base.replaced(trials=args.trials)
    if args.preset is not None:
        return preset_specs(args.preset, base)
    if args.values is None:
        raise ConfigError(args.param, "--values is required with --param")
    values = tuple(_coerce(args.param, v) for v in args.values.split(","))
    if args.algos is None:
        algos = _default_algos(args.param)
    else:
        algos = tuple(a.strip().lower() for a in args.algos.split(","))
    return [SweepSpec(base=base, parameter=args.param, values=values,
                      algos=algos)]


def _cmd_sweep(args) -> int:
    specs = _sweep_specs(args)
    total_cells = sum(len(s.algos) * len(s.values) for s in specs)
    trials = specs[0].base.trials
    print(f"sweep: {total_cells} cells x {trials} trials", file=sys.stderr)
    results = []
    done_before = 0
    for spec in specs:
        n_spec = len(spec.algos) * len(spec.values) * trials

        def _progress(done, total, base=done_before, whole=total_cells * trials):
            step = max(1, whole // 20)
            if (base + done) % step == 0 or base + done == whole:
                print(f"  {base + done}/{whole} trials", file=sys.stderr)

        results.extend(run_sweep(spec, jobs=args.jobs, progress=_progress))
        done_before += n_spec
    _write_results(results, args.out)
    return 0


def _cmd_plot(args) -> int:
    emit_chart(args.infile, args.x, args.metric, args.out)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_plot(args)
    except (ConfigError, SweepError, ChartError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
