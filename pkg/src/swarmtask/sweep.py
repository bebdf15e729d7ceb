"""Parameter sweeps: seed handling, trial fan-out, CSV output, presets.

A sweep crosses one swept parameter with a list of algorithms.  Every cell
(algo, value) runs the same list of trial seeds, derived from the master
seed by trial index, so cells are paired through common random numbers: the
arrival process of trial k is identical in every cell and differences come
from the policies alone.

Row order is deterministic (algo, then value, then trial index) no matter
how many worker threads executed the trials, and the CSV writer formats
floats with repr-stable %.6g, so a sweep is byte-reproducible end to end.

The named presets bundle the standard experiment designs:

  fig3  all four algorithms across eight arrival rates
        (lambda_inv 3e4..1e5; dl at p_prop 0.6, hybrid at t_rw 50)
  fig5  dl mixing fraction p_prop 0..1 at three arrival rates
  fig7  hybrid forced-walk length t_rw 0..200 at three arrival rates
  fig9  propagation radius i_p 1..5 at two arrival rates, exchanges
        every round (t_p = 1)
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .config import ALGOS, ConfigError, ExperimentConfig
from .engine import TrialResult, run_trial
from .rng import derive_trial_seed

CSV_HEADER = ("algo", "lambda_inv", "p_prop", "t_rw", "i_p", "t_p", "seed",
              "mu_unsatisfied", "mu_completion", "tasks_spawned",
              "tasks_completed")

# parameters that identify a cell in the CSV, in column order
_PARAM_COLS = ("lambda_inv", "p_prop", "t_rw", "i_p", "t_p")

_SWEEPABLE = {"lambda_inv", "p_prop", "t_rw", "i_p", "t_p", "d_p",
              "demand_mean", "demand_var", "t_d", "i", "follower_count",
              "m", "n", "rounds", "levy_alpha"}


class SweepError(RuntimeError):
    pass


@dataclass
class SweepSpec:
    """One swept parameter crossed with a list of algorithms.

    dl cells get p_prop from dl_p_prop and hybrid cells get t_rw from
    hybrid_t_rw unless that parameter is the swept one.
    """

    base: ExperimentConfig
    parameter: str
    values: Tuple = ()
    algos: Tuple[str, ...] = ALGOS
    dl_p_prop: float = 0.6
    hybrid_t_rw: int = 50

    def cell(self, algo: str, value) -> ExperimentConfig:
        changes = {"algo": algo, "p_prop": None, "t_rw": None,
                   self.parameter: value}
        if algo == "dl" and self.parameter != "p_prop":
            changes["p_prop"] = self.dl_p_prop
        if algo == "hybrid" and self.parameter != "t_rw":
            changes["t_rw"] = self.hybrid_t_rw
        return self.base.replaced(**changes).validate()

    def cells(self) -> List[ExperimentConfig]:
        """All cell configs, sorted by (algo, value)."""
        if self.parameter not in _SWEEPABLE:
            raise ConfigError(self.parameter, "not a sweepable parameter")
        if not self.values:
            raise ConfigError(self.parameter, "no values to sweep")
        out = []
        for algo in sorted(self.algos):
            if algo not in ALGOS:
                raise ConfigError("algo", f"unknown algorithm {algo!r}")
            for value in sorted(self.values):
                out.append(self.cell(algo, value))
        return out


def trial_seeds(master_seed: int, trials: int) -> List[int]:
    return [derive_trial_seed(master_seed, i) for i in range(trials)]


def run_sweep(spec: SweepSpec, jobs: int = 1,
              progress: Optional[Callable[[int, int], None]] = None
              ) -> List[TrialResult]:
    """Run every cell of the sweep; returns results in deterministic order.

    jobs > 1 fans trials out across worker threads (each trial is
    single-threaded); results are gathered and sorted, so the output is
    identical whatever the worker count.  Any trial failure aborts the
    sweep and names the offending cell and seed.
    """
    cells = spec.cells()
    seeds = trial_seeds(spec.base.master_seed, spec.base.trials)
    tasks = [(ci, ti, cfg, seed)
             for ci, cfg in enumerate(cells)
             for ti, seed in enumerate(seeds)]
    done = 0
    results: Dict[Tuple[int, int], TrialResult] = {}

    def _one(task):
        ci, ti, cfg, seed = task
        try:
            return ci, ti, run_trial(cfg, seed)
        except Exception as exc:
            raise SweepError(
                f"trial failed: algo={cfg.algo} {spec.parameter}="
                f"{getattr(cfg, spec.parameter)} seed={seed}: {exc}") from exc

    if jobs <= 1:
        for task in tasks:
            ci, ti, res = _one(task)
            results[ci, ti] = res
            done += 1
            if progress:
                progress(done, len(tasks))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for ci, ti, res in pool.map(_one, tasks):
                results[ci, ti] = res
                done += 1
                if progress:
                    progress(done, len(tasks))
    return [results[ci, ti]
            for ci in range(len(cells)) for ti in range(len(seeds))]


# ---- CSV ----

def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return "%.6g" % value


def _param_fields(config: ExperimentConfig) -> Tuple[str, ...]:
    return tuple(_fmt(getattr(config, name)) for name in _PARAM_COLS)


def _mean_row(group: List[TrialResult]) -> List[str]:
    params = _param_fields(group[0].config)
    unsat = sum(r.mu_unsatisfied for r in group) / len(group)
    comp_vals = [r.mu_completion for r in group if r.mu_completion is not None]
    comp = sum(comp_vals) / len(comp_vals) if comp_vals else None
    spawned = sum(r.tasks_spawned for r in group) / len(group)
    completed = sum(r.tasks_completed for r in group) / len(group)
    return [group[0].config.algo, *params, "mean",
            _fmt(unsat), _fmt(comp), _fmt(spawned), _fmt(completed)]


def write_csv(results: Sequence[TrialResult], out: io.TextIOBase,
              means: bool = True) -> None:
    """One row per trial plus, after each cell's rows, a seed='mean' row."""
    if not results:
        raise ValueError("no results to write")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    group: List[TrialResult] = []
    for res in results:
        key = (res.config.algo,) + _param_fields(res.config)
        if group and key != (group[0].config.algo,) + _param_fields(group[0].config):
            if means:
                writer.writerow(_mean_row(group))
            group = []
        writer.writerow([res.config.algo, *_param_fields(res.config),
                         str(res.seed), _fmt(res.mu_unsatisfied),
                         _fmt(res.mu_completion), str(res.tasks_spawned),
                         str(res.tasks_completed)])
        group.append(res)
    if group and means:
        writer.writerow(_mean_row(group))


def emit_csv(results: Sequence[TrialResult], path: str,
             means: bool = True) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        write_csv(results, fh, means=means)


# ---- presets ----

def _preset_fig3(base: ExperimentConfig) -> List[SweepSpec]:
    values = tuple(v * 1e4 for v in range(3, 11))
    return [SweepSpec(base=base, parameter="lambda_inv", values=values,
                      algos=ALGOS)]


def _preset_fig5(base: ExperimentConfig) -> List[SweepSpec]:
    fractions = tuple(round(k / 10, 1) for k in range(11))
    return [SweepSpec(base=base.replaced(lambda_inv=lam),
                      parameter="p_prop", values=fractions, algos=("dl",))
            for lam in (3e4, 5e4, 9e4)]


def _preset_fig7(base: ExperimentConfig) -> List[SweepSpec]:
    lengths = (0, 5, 10, 25, 50, 100, 200)
    return [SweepSpec(base=base.replaced(lambda_inv=lam),
                      parameter="t_rw", values=lengths, algos=("hybrid",))
            for lam in (3e4, 5e4, 9e4)]


def _preset_fig9(base: ExperimentConfig) -> List[SweepSpec]:
    return [SweepSpec(base=base.replaced(lambda_inv=lam, t_p=1),
                      parameter="i_p", values=(1, 2, 3, 4, 5),
                      algos=("prop",))
            for lam in (5e4, 9e4)]


PRESETS: Dict[str, Callable[[ExperimentConfig], List[SweepSpec]]] = {
    "fig3": _preset_fig3,
    "fig5": _preset_fig5,
    "fig7": _preset_fig7,
    "fig9": _preset_fig9,
}


def preset_specs(name: str, base: ExperimentConfig) -> List[SweepSpec]:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; "
                          f"choose from {', '.join(sorted(PRESETS))}")
    return PRESETS[name](base)
