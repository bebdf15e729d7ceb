"""Deterministic grid-world simulator of swarm task allocation.

Robot followers on a finite grid discover and work off stochastically
arriving tasks under four allocation policies (Levy random walk, record
propagation, a fixed mix of the two, and a forced-walk hybrid), in
synchronized rounds, with fully seeded reproducible randomness.  The sweep
and chart modules reproduce the standard experiment designs as CSV tables
and SVG figures; the swarmtask console script exposes them.
"""

from .arrivals import ArrivalParams, sample_demand, sample_interarrival
from .chart import ChartError, emit_chart, render_chart
from .config import (ALGOS, ConfigError, ExperimentConfig, parse_config,
                     parse_config_text)
from .engine import (CapacityError, FollowerView, TaskView, TrialResult,
                     VertexView, WorldState, build_world, neighborhood,
                     place_agent, run_trial, spawn_task, step_round)
from .grid import Direction, GridConfig, Position, apply_move, chebyshev, step_toward
from .metrics import MetricsAccumulator
from .policies import (BehaviorState, PolicyKind, decide_stay, dl_assign,
                       levy_step)
from .propagation import (TaskInfo, informed_set, merge, propagator_at,
                          records_at)
from .rng import Stream, derive_trial_seed
from .sweep import (PRESETS, SweepError, SweepSpec, emit_csv, preset_specs,
                    run_sweep, trial_seeds, write_csv)

__version__ = "0.1.0"

__all__ = [
    "ALGOS", "ArrivalParams", "BehaviorState", "CapacityError", "ChartError",
    "ConfigError", "Direction", "ExperimentConfig", "FollowerView",
    "GridConfig", "MetricsAccumulator", "PRESETS", "PolicyKind", "Position",
    "Stream", "SweepError", "SweepSpec", "TaskInfo", "TaskView",
    "TrialResult", "VertexView", "WorldState", "apply_move", "build_world",
    "chebyshev", "decide_stay", "derive_trial_seed", "dl_assign",
    "emit_chart", "emit_csv", "informed_set", "levy_step", "merge",
    "neighborhood", "parse_config", "parse_config_text", "place_agent",
    "preset_specs", "propagator_at", "records_at", "render_chart",
    "run_sweep", "run_trial", "sample_demand", "sample_interarrival",
    "spawn_task", "step_round", "step_toward", "trial_seeds", "write_csv",
]
