"""The synchronized round engine.

A round is one simultaneous transition of every agent and vertex, realized
as snapshot-then-commit:

  1. every follower decides from the committed round-start state, writing
     its staged next state (no decision sees another same-round move);
  2. queued work decrements apply; tasks reaching zero residual disappear,
     their vertices re-arm an arrival countdown from the completion round;
  3. agents that completed a work block choose stay-or-leave; anyone whose
     committed task vanished this round lets go of it;
  4. arrival countdowns that expired spawn new tasks;
  5. propagators re-sense co-located tasks and, on period rounds, exchange
     fresh records;
  6. staged agent states commit, the round counter advances, and the
     post-commit residual sum D_t is recorded.

All mutable state lives in flat numpy arrays so the whole round executes in
compiled kernels; WorldState wraps the arrays and offers object views
(tasks, followers, vertex neighborhoods) for inspection and tests.  Task
storage is preallocated from the expected arrival count with generous
headroom; a trial that outgrows it retries with a larger allocation and,
because every random draw comes from keyed streams, reproduces the same
trajectory.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from numba import njit

from . import rng
from .arrivals import _draw_gap, _scan_spawns
from .config import ExperimentConfig
from .grid import Direction, GridConfig, Position
from .metrics import MetricsAccumulator
from .policies import (_HYBRID, _MOVING, _PROP, _RW, _WALKING, _WORKING,
                       BehaviorState, PolicyKind, _decide_agents,
                       _release_phase, dl_assign)
from .propagation import DROPPED, UNKNOWN, TaskInfo, _broadcast, _sense

# counters layout
_N_SPAWNED = 0
_N_LIVE = 1
_N_AF = 2
_STAMP = 3
_WORK_UNITS = 4
_COMPLETED = 5
_OVERFLOW = 6

# largest admissible field allocation (values + fresh lists), bytes
_FIELD_BYTES_LIMIT = 2 << 30


class CapacityError(RuntimeError):
    def __init__(self, capacity: int, round_: int):
        self.capacity = capacity
        self.round = round_
        super().__init__(f"task capacity {capacity} exhausted at round {round_}")


@njit(cache=True, nogil=True)
def _seed_world(states, seed, wh, n_agents):
    for v in range(wh):
        rng.seed_stream(states, v, seed, rng.ARRIVALS, v)
        rng.seed_stream(states, wh + v, seed, rng.DEMANDS, v)
    for a in range(n_agents):
        rng.seed_stream(states, 2 * wh + a, seed, rng.POLICY, a)
        rng.seed_stream(states, 2 * wh + n_agents + a, seed, rng.LEVY, a)
    rng.seed_stream(states, 2 * wh + 2 * n_agents, seed, rng.INIT, 0)


@njit(cache=True, nogil=True)
def _init_world(states, init_row, w, h, lam, n_agents, a_x, a_y, next_spawn):
    # uniform initial placement, x then y per agent, from the init stream
    for a in range(n_agents):
        a_x[a] = rng.randint(states, init_row, w)
        a_y[a] = rng.randint(states, init_row, h)
    # arrival countdowns start at round 0 on every vertex
    if math.isinf(lam):
        for v in range(w * h):
            next_spawn[v] = -1
    else:
        for v in range(w * h):
            next_spawn[v] = _draw_gap(states, v, lam)


@njit(cache=True, nogil=True)
def _rebuild_af(f_active, af_idx, counters):
    n = 0
    for s in range(counters[_N_SPAWNED]):
        if f_active[s] == 1:
            af_idx[n] = s
            n += 1
    counters[_N_AF] = n


@njit(cache=True, nogil=True)
def _step_kernel(t,
                 w, h, radius, i_p, t_p, dp2, t_d, n_agents, cap,
                 lam, mu_d, sig_d, alpha, leg_cap, t_rw, prop_on,
                 states, arr_base, dem_base, pol_base, levy_base,
                 next_spawn,
                 t_x, t_y, t_demand, t_res, t_spawn, t_alive,
                 task_at, live_idx,
                 f_val, f_fresh, f_nfresh, f_src_fresh, f_active, af_idx,
                 a_x, a_y, a_state, a_target, a_counter,
                 a_leg_dir, a_leg_rem, a_forced, a_policy,
                 n_x, n_y, n_state, n_target, n_counter,
                 n_leg_dir, n_leg_rem, n_forced,
                 blacklist, stamp,
                 decr, completers, cand_slot, cand_w, scr_xy, scr_val,
                 counters, out_round, out_completed):
    n_spawned0 = counters[_N_SPAWNED]
    for s in range(n_spawned0):
        decr[s] = 0

    # 1. decisions from the round-start snapshot
    n_comp = _decide_agents(w, h, radius, t_d, t_rw, alpha, leg_cap, n_agents,
                            states, pol_base, levy_base,
                            a_x, a_y, a_state, a_target, a_counter,
                            a_leg_dir, a_leg_rem, a_forced, a_policy,
                            n_x, n_y, n_state, n_target, n_counter,
                            n_leg_dir, n_leg_rem, n_forced,
                            blacklist,
                            t_x, t_y, t_res, t_alive,
                            live_idx, counters[_N_LIVE],
                            f_val, af_idx, counters[_N_AF],
                            decr, completers, cand_slot, cand_w)

    # 2. apply work; completed tasks leave and re-arm their vertex
    n_done = 0
    for s in range(n_spawned0):
        dc = decr[s]
        if dc > 0 and t_alive[s] == 1:
            res = t_res[s]
            applied = dc if dc < res else res
            t_res[s] = res - applied
            counters[_WORK_UNITS] += applied
            if res == applied:
                t_alive[s] = 0
                task_at[t_y[s], t_x[s]] = -1
                li = 0
                while live_idx[li] != s:
                    li += 1
                counters[_N_LIVE] -= 1
                nl = counters[_N_LIVE]
                while li < nl:
                    live_idx[li] = live_idx[li + 1]
                    li += 1
                out_completed[n_done] = s
                n_done += 1
                counters[_COMPLETED] += 1
                v = t_y[s] * w + t_x[s]
                if math.isinf(lam):
                    next_spawn[v] = -1
                else:
                    next_spawn[v] = t + _draw_gap(states, arr_base + v, lam)

    # 3a. stay-or-leave on completed work blocks
    _release_phase(radius, t_rw, n_agents,
                   states, pol_base,
                   a_x, a_y, a_state, a_target, a_policy,
                   n_state, n_target, n_counter, n_leg_rem, n_forced,
                   blacklist, t_res,
                   completers, n_comp)

    # 3b. release anyone committed to a task that vanished this round
    for a in range(n_agents):
        tg = n_target[a]
        if tg >= 0 and t_alive[tg] == 0:
            was_working = n_state[a] == _WORKING
            n_state[a] = _WALKING
            n_target[a] = -1
            n_counter[a] = 0
            n_leg_rem[a] = 0
            if was_working and a_policy[a] == _HYBRID:
                n_forced[a] = t_rw

    # 4. arrivals due this round
    n_new = _scan_spawns(t, w, h, cap, mu_d, sig_d, prop_on,
                         states, dem_base,
                         next_spawn, t_x, t_y, t_demand, t_res, t_spawn,
                         t_alive, task_at, live_idx, f_active, counters)
    if n_new > 0 and prop_on == 1:
        _rebuild_af(f_active, af_idx, counters)

    # 5. propagators sense ground truth, then exchange on period rounds
    if prop_on == 1:
        _sense(w, t_x, t_y, t_res, t_alive,
               f_val, f_fresh, f_nfresh, f_src_fresh,
               af_idx, counters[_N_AF])
        if t % t_p == 0:
            deact = _broadcast(w, h, i_p, dp2,
                               t_x, t_y, t_alive,
                               f_val, f_fresh, f_nfresh, f_src_fresh,
                               f_active, af_idx, counters[_N_AF],
                               stamp, counters, scr_xy, scr_val)
            if deact > 0:
                _rebuild_af(f_active, af_idx, counters)

    # 6. commit agent transitions; D_t is the post-commit residual sum
    for a in range(n_agents):
        a_x[a] = n_x[a]
        a_y[a] = n_y[a]
        a_state[a] = n_state[a]
        a_target[a] = n_target[a]
        a_counter[a] = n_counter[a]
        a_leg_dir[a] = n_leg_dir[a]
        a_leg_rem[a] = n_leg_rem[a]
        a_forced[a] = n_forced[a]
    d_t = 0
    for li in range(counters[_N_LIVE]):
        d_t += t_res[live_idx[li]]
    out_round[0] = d_t
    out_round[1] = n_done
    out_round[2] = n_new


@njit(cache=True, nogil=True)
def _run_rounds(t_start, n_rounds,
                w, h, radius, i_p, t_p, dp2, t_d, n_agents, cap,
                lam, mu_d, sig_d, alpha, leg_cap, t_rw, prop_on,
                states, arr_base, dem_base, pol_base, levy_base,
                next_spawn,
                t_x, t_y, t_demand, t_res, t_spawn, t_alive,
                task_at, live_idx,
                f_val, f_fresh, f_nfresh, f_src_fresh, f_active, af_idx,
                a_x, a_y, a_state, a_target, a_counter,
                a_leg_dir, a_leg_rem, a_forced, a_policy,
                n_x, n_y, n_state, n_target, n_counter,
                n_leg_dir, n_leg_rem, n_forced,
                blacklist, stamp,
                decr, completers, cand_slot, cand_w, scr_xy, scr_val,
                counters, out_round, out_completed,
                dt_out, comp_slot, comp_round):
    """Whole-trial loop around _step_kernel; returns (overflow_round, completions)."""
    n_comp = 0
    for i in range(n_rounds):
        t = t_start + 1 + i
        _step_kernel(t,
                     w, h, radius, i_p, t_p, dp2, t_d, n_agents, cap,
                     lam, mu_d, sig_d, alpha, leg_cap, t_rw, prop_on,
                     states, arr_base, dem_base, pol_base, levy_base,
                     next_spawn,
                     t_x, t_y, t_demand, t_res, t_spawn, t_alive,
                     task_at, live_idx,
                     f_val, f_fresh, f_nfresh, f_src_fresh, f_active, af_idx,
                     a_x, a_y, a_state, a_target, a_counter,
                     a_leg_dir, a_leg_rem, a_forced, a_policy,
                     n_x, n_y, n_state, n_target, n_counter,
                     n_leg_dir, n_leg_rem, n_forced,
                     blacklist, stamp,
                     decr, completers, cand_slot, cand_w, scr_xy, scr_val,
                     counters, out_round, out_completed)
        if counters[_OVERFLOW] != 0:
            return t, n_comp
        dt_out[i] = out_round[0]
        for j in range(out_round[1]):
            comp_slot[n_comp] = out_completed[j]
            comp_round[n_comp] = t
            n_comp += 1
    return 0, n_comp


@dataclass
class TaskView:
    id: int
    location: Position
    demand: int
    residual: int
    spawn_round: int
    alive: bool


@dataclass
class FollowerView:
    id: int
    position: Position
    policy: PolicyKind
    behavior: BehaviorState
    target: Optional[int]
    work_counter: int
    forced_rw_remaining: int
    leg_direction: Direction
    leg_remaining: int
    blacklist: frozenset


@dataclass
class VertexView:
    position: Position
    task: Optional[TaskView]
    records: Dict[int, TaskInfo]
    agents_here: List[int]


@dataclass
class TrialResult:
    config: ExperimentConfig
    seed: int
    mu_unsatisfied: float
    mu_completion: Optional[float]
    tasks_spawned: int
    tasks_completed: int
    wall_time: float


@dataclass
class WorldState:
    """All state of one trial; arrays are documented where allocated."""

    config: ExperimentConfig
    cfg: GridConfig
    propagation_enabled: bool
    capacity: int
    round: int
    rng_states: np.ndarray
    arr_base: int
    dem_base: int
    pol_base: int
    levy_base: int
    next_spawn: np.ndarray
    t_x: np.ndarray
    t_y: np.ndarray
    t_demand: np.ndarray
    t_res: np.ndarray
    t_spawn: np.ndarray
    t_alive: np.ndarray
    task_at: np.ndarray
    live_idx: np.ndarray
    f_val: np.ndarray
    f_fresh: np.ndarray
    f_nfresh: np.ndarray
    f_src_fresh: np.ndarray
    f_active: np.ndarray
    af_idx: np.ndarray
    a_x: np.ndarray
    a_y: np.ndarray
    a_state: np.ndarray
    a_target: np.ndarray
    a_counter: np.ndarray
    a_leg_dir: np.ndarray
    a_leg_rem: np.ndarray
    a_forced: np.ndarray
    a_policy: np.ndarray
    next_x: np.ndarray
    next_y: np.ndarray
    next_state: np.ndarray
    next_target: np.ndarray
    next_counter: np.ndarray
    next_leg_dir: np.ndarray
    next_leg_rem: np.ndarray
    next_forced: np.ndarray
    blacklist: np.ndarray
    stamp: np.ndarray
    decr: np.ndarray
    completers: np.ndarray
    cand_slot: np.ndarray
    cand_w: np.ndarray
    scr_xy: np.ndarray
    scr_val: np.ndarray
    counters: np.ndarray
    out_round: np.ndarray
    out_completed: np.ndarray
    completions: List[Tuple[int, int, int, int]] = field(default_factory=list)

    # ---- kernel plumbing ----

    def _kargs(self) -> tuple:
        c = self.config
        g = self.cfg
        return (g.width, g.height, g.influence_radius, g.prop_radius,
                g.prop_period, float(g.prop_max_dist) ** 2, g.work_period,
                g.follower_count, self.capacity,
                float(c.lambda_inv), float(c.demand_mean),
                math.sqrt(c.demand_var), float(c.levy_alpha),
                max(g.width, g.height), int(c.t_rw or 0),
                1 if self.propagation_enabled else 0,
                self.rng_states, self.arr_base, self.dem_base,
                self.pol_base, self.levy_base,
                self.next_spawn,
                self.t_x, self.t_y, self.t_demand, self.t_res, self.t_spawn,
                self.t_alive, self.task_at, self.live_idx,
                self.f_val, self.f_fresh, self.f_nfresh, self.f_src_fresh,
                self.f_active, self.af_idx,
                self.a_x, self.a_y, self.a_state, self.a_target,
                self.a_counter, self.a_leg_dir, self.a_leg_rem,
                self.a_forced, self.a_policy,
                self.next_x, self.next_y, self.next_state, self.next_target,
                self.next_counter, self.next_leg_dir, self.next_leg_rem,
                self.next_forced,
                self.blacklist, self.stamp,
                self.decr, self.completers, self.cand_slot, self.cand_w,
                self.scr_xy, self.scr_val,
                self.counters, self.out_round, self.out_completed)

    def _rebuild_active_fields(self) -> None:
        n = int(self.counters[_N_SPAWNED])
        active = np.flatnonzero(self.f_active[:n])
        self.af_idx[:active.size] = active
        self.counters[_N_AF] = active.size

    # ---- inspection ----

    @property
    def unsatisfied_now(self) -> int:
        n_live = int(self.counters[_N_LIVE])
        return int(self.t_res[self.live_idx[:n_live]].sum())

    @property
    def tasks_spawned(self) -> int:
        return int(self.counters[_N_SPAWNED])

    @property
    def work_units(self) -> int:
        return int(self.counters[_WORK_UNITS])

    def live_tasks(self) -> List["TaskView"]:
        n_live = int(self.counters[_N_LIVE])
        return [self.task(int(s)) for s in self.live_idx[:n_live]]

    def task(self, task_id: int) -> TaskView:
        return TaskView(task_id,
                        Position(int(self.t_x[task_id]), int(self.t_y[task_id])),
                        int(self.t_demand[task_id]), int(self.t_res[task_id]),
                        int(self.t_spawn[task_id]), bool(self.t_alive[task_id]))

    def follower(self, agent_id: int) -> FollowerView:
        a = agent_id
        n = int(self.counters[_N_SPAWNED])
        black = frozenset(int(s) for s in np.flatnonzero(self.blacklist[a, :n]))
        target = int(self.a_target[a])
        return FollowerView(a, Position(int(self.a_x[a]), int(self.a_y[a])),
                            PolicyKind(int(self.a_policy[a])),
                            BehaviorState(int(self.a_state[a])),
                            target if target >= 0 else None,
                            int(self.a_counter[a]), int(self.a_forced[a]),
                            Direction(int(self.a_leg_dir[a])),
                            int(self.a_leg_rem[a]), black)

    def followers(self) -> List[FollowerView]:
        return [self.follower(a) for a in range(self.cfg.follower_count)]

    def check_invariants(self) -> None:
        """Cross-check array state; used by validating runs and tests."""
        g = self.cfg
        n = int(self.counters[_N_SPAWNED])
        n_live = int(self.counters[_N_LIVE])
        assert (self.a_x[: g.follower_count] >= 0).all()
        assert (self.a_x[: g.follower_count] < g.width).all()
        assert (self.a_y[: g.follower_count] >= 0).all()
        assert (self.a_y[: g.follower_count] < g.height).all()
        live = self.live_idx[:n_live]
        assert (np.diff(live) > 0).all() if n_live > 1 else True
        assert (self.t_alive[live] == 1).all()
        assert int(self.t_alive[:n].sum()) == n_live
        assert (self.t_res[:n] >= 0).all()
        assert (self.t_res[:n] <= self.t_demand[:n]).all()
        # at most one task per vertex, mapping consistent both ways
        assert int((self.task_at >= 0).sum()) == n_live
        for s in live:
            assert int(self.task_at[self.t_y[s], self.t_x[s]]) == int(s)
        # demand conservation: spawned demand = residual + applied work
        assert int(self.t_demand[:n].sum()) == int(self.t_res[:n].sum()) + self.work_units
        # working agents sit on their live task with a mid-block counter
        for a in range(g.follower_count):
            if int(self.a_state[a]) == _WORKING:
                s = int(self.a_target[a])
                assert s >= 0 and self.t_alive[s] == 1
                assert int(self.a_x[a]) == int(self.t_x[s])
                assert int(self.a_y[a]) == int(self.t_y[s])
                assert 0 <= int(self.a_counter[a]) < g.work_period
        # no record farther than prop_max_dist from its task
        if self.propagation_enabled and self.f_val.shape[0]:
            dp2 = float(g.prop_max_dist) ** 2
            ys, xs = np.mgrid[0: g.height, 0: g.width]
            for s in range(n):
                plane = self.f_val[s]
                known = (plane != UNKNOWN) & (plane != DROPPED)
                if known.any():
                    d2 = (xs - int(self.t_x[s])) ** 2 + (ys - int(self.t_y[s])) ** 2
                    assert not (known & (d2 > dp2)).any()


def build_world(config: ExperimentConfig, seed: int,
                propagation: Optional[bool] = None,
                capacity_multiplier: int = 1) -> WorldState:
    """Allocate and seed a fresh world at round 0."""
    config.validate()
    w, h, f = config.m, config.n, config.follower_count
    wh = w * h
    cfg = GridConfig(width=w, height=h, influence_radius=config.i,
                     prop_radius=config.i_p, prop_period=config.t_p,
                     prop_max_dist=config.d_p, work_period=config.t_d,
                     follower_count=f)
    prop_on = (config.algo != "rw") if propagation is None else propagation

    if math.isinf(config.lambda_inv):
        expected = 0.0
    else:
        expected = 3.0 * wh * config.rounds / config.lambda_inv
    capacity = (int(expected) + 64) * capacity_multiplier
    if prop_on and capacity * wh * 8 > _FIELD_BYTES_LIMIT:
        raise RuntimeError(
            "propagation fields for this grid and arrival rate would exceed "
            f"{_FIELD_BYTES_LIMIT >> 30} GiB; reduce m*n*rounds/lambda_inv")

    states = np.zeros((2 * wh + 2 * f + 1, 4), dtype=np.uint64)
    seed64 = np.uint64(seed & rng._MASK64)
    _seed_world(states, seed64, wh, f)

    fields = capacity if prop_on else 0
    world = WorldState(
        config=config, cfg=cfg, propagation_enabled=prop_on,
        capacity=capacity, round=0,
        rng_states=states, arr_base=0, dem_base=wh,
        pol_base=2 * wh, levy_base=2 * wh + f,
        next_spawn=np.full(wh, -1, dtype=np.int64),
        t_x=np.zeros(capacity, dtype=np.int32),
        t_y=np.zeros(capacity, dtype=np.int32),
        t_demand=np.zeros(capacity, dtype=np.int32),
        t_res=np.zeros(capacity, dtype=np.int32),
        t_spawn=np.zeros(capacity, dtype=np.int32),
        t_alive=np.zeros(capacity, dtype=np.uint8),
        task_at=np.full((h, w), -1, dtype=np.int32),
        live_idx=np.zeros(capacity, dtype=np.int32),
        f_val=np.full((fields, h, w), UNKNOWN, dtype=np.int32),
        f_fresh=np.zeros((fields, wh), dtype=np.int32),
        f_nfresh=np.zeros(capacity, dtype=np.int32),
        f_src_fresh=np.zeros(capacity, dtype=np.uint8),
        f_active=np.zeros(capacity, dtype=np.uint8),
        af_idx=np.zeros(capacity, dtype=np.int32),
        a_x=np.zeros(f, dtype=np.int32),
        a_y=np.zeros(f, dtype=np.int32),
        a_state=np.full(f, _WALKING, dtype=np.int32),
        a_target=np.full(f, -1, dtype=np.int32),
        a_counter=np.zeros(f, dtype=np.int32),
        a_leg_dir=np.zeros(f, dtype=np.int32),
        a_leg_rem=np.zeros(f, dtype=np.int32),
        a_forced=np.zeros(f, dtype=np.int32),
        a_policy=np.zeros(f, dtype=np.int32),
        next_x=np.zeros(f, dtype=np.int32),
        next_y=np.zeros(f, dtype=np.int32),
        next_state=np.zeros(f, dtype=np.int32),
        next_target=np.zeros(f, dtype=np.int32),
        next_counter=np.zeros(f, dtype=np.int32),
        next_leg_dir=np.zeros(f, dtype=np.int32),
        next_leg_rem=np.zeros(f, dtype=np.int32),
        next_forced=np.zeros(f, dtype=np.int32),
        blacklist=np.zeros((f, capacity), dtype=np.uint8),
        stamp=np.zeros((h, w), dtype=np.int64),
        decr=np.zeros(capacity, dtype=np.int32),
        completers=np.zeros(f, dtype=np.int32),
        cand_slot=np.zeros(capacity, dtype=np.int32),
        cand_w=np.zeros(capacity, dtype=np.float64),
        scr_xy=np.zeros(wh, dtype=np.int32),
        scr_val=np.zeros(wh, dtype=np.int32),
        counters=np.zeros(8, dtype=np.int64),
        out_round=np.zeros(4, dtype=np.int64),
        out_completed=np.zeros(capacity, dtype=np.int32),
    )

    if config.algo == "dl":
        world.a_policy[:] = [int(p) for p in dl_assign(f, config.p_prop)]
    elif config.algo == "prop":
        world.a_policy[:] = _PROP
    elif config.algo == "hybrid":
        world.a_policy[:] = _HYBRID
        world.a_forced[:] = int(config.t_rw)

    _init_world(states, 2 * wh + 2 * f, w, h, float(config.lambda_inv), f,
                world.a_x, world.a_y, world.next_spawn)
    return world


def step_round(world: WorldState) -> WorldState:
    """Advance one round in place (see module docstring for the phases)."""
    t = world.round + 1
    _step_kernel(t, *world._kargs())
    if world.counters[_OVERFLOW]:
        raise CapacityError(world.capacity, t)
    for j in range(int(world.out_round[1])):
        s = int(world.out_completed[j])
        world.completions.append(
            (s, int(world.t_demand[s]), int(world.t_spawn[s]), t))
    world.round = t
    return world


def _execute(world: WorldState, rounds: int, validate: bool) -> MetricsAccumulator:
    acc = MetricsAccumulator()
    if validate:
        for _ in range(rounds):
            step_round(world)
            world.check_invariants()
            acc.record_round(world)
            assert acc.unsatisfied_sum >= 0
            assert world.unsatisfied_now == int(world.out_round[0])
    else:
        dt_out = np.zeros(rounds, dtype=np.int64)
        comp_slot = np.zeros(world.capacity, dtype=np.int32)
        comp_round = np.zeros(world.capacity, dtype=np.int32)
        overflow_round, n_comp = _run_rounds(world.round, rounds,
                                             *world._kargs(),
                                             dt_out, comp_slot, comp_round)
        if overflow_round:
            raise CapacityError(world.capacity, int(overflow_round))
        world.round += rounds
        for i in range(n_comp):
            s = int(comp_slot[i])
            world.completions.append(
                (s, int(world.t_demand[s]), int(world.t_spawn[s]),
                 int(comp_round[i])))
        acc.unsatisfied_sum = int(dt_out.sum())
        acc.rounds_observed = rounds
    for _task_id, demand, spawn_round, completion_round in world.completions:
        acc.record_completion(demand, spawn_round, completion_round)
    acc.spawned_count = world.tasks_spawned
    return acc


def run_trial(config: ExperimentConfig, seed: int, validate: bool = False,
              keep_world: bool = False):
    """Run one seeded trial; returns TrialResult (and the world if asked).

    A capacity overflow (far more arrivals than the expected-count headroom
    covers) retries from scratch with a larger allocation; the keyed RNG
    streams make the retried trajectory identical.
    """
    started = time.perf_counter()
    multiplier = 1
    while True:
        world = build_world(config, seed, capacity_multiplier=multiplier)
        try:
            acc = _execute(world, config.rounds, validate)
            break
        except CapacityError:
            if multiplier >= 16:
                raise
            multiplier *= 4
    mu_unsat, mu_comp, _s = acc.finalize()
    result = TrialResult(config=config, seed=seed,
                         mu_unsatisfied=mu_unsat, mu_completion=mu_comp,
                         tasks_spawned=acc.spawned_count,
                         tasks_completed=len(acc.completions),
                         wall_time=time.perf_counter() - started)
    if keep_world:
        return result, world
    return result


# ---- inspection and scenario-construction helpers ----

def neighborhood(world: WorldState, center: Position,
                 radius: int) -> List[Tuple[Tuple[int, int], VertexView]]:
    """All in-bounds vertex configurations within Chebyshev radius."""
    from .propagation import records_at
    out = []
    for dy in range(-radius, radius + 1):
        y = center.y + dy
        if y < 0 or y >= world.cfg.height:
            continue
        for dx in range(-radius, radius + 1):
            x = center.x + dx
            if x < 0 or x >= world.cfg.width:
                continue
            slot = int(world.task_at[y, x])
            task = world.task(slot) if slot >= 0 else None
            agents = [a for a in range(world.cfg.follower_count)
                      if int(world.a_x[a]) == x and int(world.a_y[a]) == y]
            out.append(((dx, dy),
                        VertexView(Position(x, y), task,
                                   records_at(world, x, y), agents)))
    return out


def spawn_task(world: WorldState, x: int, y: int, demand: int) -> int:
    """Inject a task at a free vertex (scenario setup; spawn round = now)."""
    if world.task_at[y, x] >= 0:
        raise ValueError(f"vertex ({x}, {y}) already has a task")
    n = int(world.counters[_N_SPAWNED])
    if n >= world.capacity:
        raise CapacityError(world.capacity, world.round)
    world.t_x[n] = x
    world.t_y[n] = y
    world.t_demand[n] = demand
    world.t_res[n] = demand
    world.t_spawn[n] = world.round
    world.t_alive[n] = 1
    world.task_at[y, x] = n
    world.live_idx[int(world.counters[_N_LIVE])] = n
    world.counters[_N_LIVE] += 1
    world.counters[_N_SPAWNED] = n + 1
    world.next_spawn[y * world.cfg.width + x] = -1
    if world.propagation_enabled:
        world.f_active[n] = 1
        world._rebuild_active_fields()
    return n


def place_agent(world: WorldState, agent_id: int, x: int, y: int) -> None:
    """Move an agent and reset it to fresh random-walking state."""
    world.a_x[agent_id] = x
    world.a_y[agent_id] = y
    world.a_state[agent_id] = _WALKING
    world.a_target[agent_id] = -1
    world.a_counter[agent_id] = 0
    world.a_leg_rem[agent_id] = 0


def blacklist_task(world: WorldState, agent_id: int, task_id: int) -> None:
    """Pre-blacklist a task for an agent (scenario setup)."""
    world.blacklist[agent_id, task_id] = 1
