"""Dynamic task arrivals: per-vertex exponential gaps, normal demands.

Each vertex runs its own arrival process: while unoccupied it counts down an
exponentially distributed gap (rounded to the nearest round, clamped to at
least 1), spawns a task when the countdown expires, and re-arms only after
that task disappears.  Demands are drawn from Normal(demand_mean,
demand_var), rounded to the nearest integer, resampled until >= 1.

The engine keeps the countdowns as absolute spawn rounds (next_spawn[v]):
a countdown only ever runs while the vertex is task-free, so "decrement
every round, spawn at zero" and "spawn when the round counter reaches
start + gap" produce identical trajectories, and the scan below is the
whole per-round arrival step.  Gap and demand draws use per-vertex streams,
so the realized arrival randomness at a vertex is independent of everything
else that happens in the trial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, List

from numba import njit

from . import rng

if TYPE_CHECKING:
    from .engine import TaskView, WorldState


@dataclass(frozen=True)
class ArrivalParams:
    lambda_inv: float        # mean rounds between arrivals (1/lambda)
    demand_mean: float
    demand_var: float


@njit(cache=True)
def _draw_gap(states, row, mean):
    e = rng.exponential(states, row, mean)
    if e > 4.0e18:
        e = 4.0e18    # keep the rounded gap inside int64
    g = rng.round_half_up(e)
    return g if g >= 1 else 1


@njit(cache=True)
def _draw_demand(states, row, mu, sigma):
    while True:
        d = rng.round_half_up(rng.normal(states, row, mu, sigma))
        if d >= 1:
            return d


def sample_interarrival(params: ArrivalParams, stream: rng.Stream) -> int:
    """Exp(1/lambda_inv) gap in rounds, nearest-integer, clamped to >= 1."""
    return int(_draw_gap(stream.states, 0, params.lambda_inv))


def sample_demand(params: ArrivalParams, stream: rng.Stream) -> int:
    """Normal(mean, var) demand, nearest-integer, resampled until >= 1."""
    return int(_draw_demand(stream.states, 0, params.demand_mean,
                            math.sqrt(params.demand_var)))


@njit(cache=True, nogil=True)
def _scan_spawns(t, w, h, cap, mu_d, sig_d, prop_on,
                 states, dem_base,
                 next_spawn, t_x, t_y, t_demand, t_res, t_spawn, t_alive,
                 task_at, live_idx, f_active, counters):
    """Spawn every task due exactly at round t.  Returns the spawn count.

    Vertices are visited in index order (row-major), which fixes task id
    assignment within a round.  next_spawn[v] < 0 means no countdown is
    running (vertex occupied, or arrivals disabled).
    """
    spawned = 0
    for v in range(w * h):
        if next_spawn[v] == t:
            if counters[0] >= cap:
                counters[6] = 1      # capacity overflow; caller aborts
                continue
            y = v // w
            x = v - y * w
            slot = counters[0]
            counters[0] = slot + 1
            d = _draw_demand(states, dem_base + v, mu_d, sig_d)
            t_x[slot] = x
            t_y[slot] = y
            t_demand[slot] = d
            t_res[slot] = d
            t_spawn[slot] = t
            t_alive[slot] = 1
            task_at[y, x] = slot
            live_idx[counters[1]] = slot
            counters[1] += 1
            if prop_on:
                f_active[slot] = 1
            next_spawn[v] = -1       # occupied: countdown pauses until completion
            spawned += 1
    return spawned


def tick_arrivals(world: "WorldState") -> List["TaskView"]:
    """Advance one round processing only arrivals; returns tasks spawned.

    For studying the arrival process in isolation (the full engine performs
    this same scan as one phase of step_round).
    """
    t = world.round + 1
    before = int(world.counters[0])
    _scan_spawns(t, world.cfg.width, world.cfg.height, world.capacity,
                 world.config.demand_mean, math.sqrt(world.config.demand_var),
                 1 if world.propagation_enabled else 0,
                 world.rng_states, world.dem_base,
                 world.next_spawn, world.t_x, world.t_y, world.t_demand,
                 world.t_res, world.t_spawn, world.t_alive,
                 world.task_at, world.live_idx, world.f_active, world.counters)
    if world.counters[6]:
        raise RuntimeError(f"task capacity {world.capacity} exceeded at round {t}")
    world.round = t
    world._rebuild_active_fields()
    return [world.task(i) for i in range(before, int(world.counters[0]))]
