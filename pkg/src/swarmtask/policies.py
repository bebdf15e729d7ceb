"""Follower behavior: walk, steer, work, release.

All four algorithms share one per-round decision flow; they differ only in
which branch an agent takes when it is not already working:

  rw      Levy walk until a task is in sight, then commit to the nearest
          task and work it to completion (never releases, never blacklists).
  prop    Nearest visible non-blacklisted task wins; otherwise sample one of
          the records stored at the agent's vertex with probability
          proportional to recorded value / squared distance and step toward
          it (a fresh, independent sample every round; records of finished
          tasks never attract).  With no usable records the agent walks
          like rw.  After each completed work block the agent stays with
          probability min(residual / k, 1), where k counts the agents
          committed to the task; on leaving it blacklists the task forever.
  dl      A fixed fraction of agents (chosen by id before round 0) run prop,
          the rest run rw.
  hybrid  prop semantics, but the agent is forced into the Levy walk for
          t_rw rounds at the start and after every departure from a task it
          was working (release or completion); sighting a task cancels the
          forced phase.

Behavior states: RANDOM_WALKING covers both undirected motion and the
per-round record-guided step (neither commits to a task); MOVING_TO_TARGET
and WORKING carry the committed task id.  Working agents do not look around;
everyone else re-decides from the sight check every round.

Agents draw from two private streams: the policy stream (record sampling,
uniform steps, stay/leave) and the leg stream (walk legs).  An agent only
touches the leg stream while walking in rw mode, which is what makes the
degenerate parameter settings (dl 0/1, hybrid 0) reproduce rw/prop
trajectories exactly under the same seed.
"""

from __future__ import annotations

import math
from enum import IntEnum
from typing import TYPE_CHECKING, List

from numba import njit

from . import rng
from .grid import Direction, GridConfig, _blocked, _move, _step_toward
from .propagation import UNKNOWN

if TYPE_CHECKING:
    pass


class BehaviorState(IntEnum):
    RANDOM_WALKING = 0
    MOVING_TO_TARGET = 1
    WORKING = 2


class PolicyKind(IntEnum):
    RW = 0
    PROP = 1
    HYBRID = 2


_WALKING = 0
_MOVING = 1
_WORKING = 2
_RW = 0
_PROP = 1
_HYBRID = 2


def dl_assign(follower_count: int, p_prop: float) -> List[PolicyKind]:
    """Fixed pre-round policy split: the first round(p_prop * F) ids run prop."""
    n_prop = int(math.floor(p_prop * follower_count + 0.5))
    return [PolicyKind.PROP if a < n_prop else PolicyKind.RW
            for a in range(follower_count)]


@njit(cache=True)
def _draw_leg(states, row, alpha, cap):
    """New walk leg: uniform direction, then heavy-tailed length.

    Length is ceil(u ** (-1/alpha)) for u uniform on (0, 1], capped at the
    larger grid dimension, so P(length > L) = L ** -alpha below the cap.
    """
    d = rng.randint(states, row, 4)
    u = 1.0 - rng.u01(states, row)
    length = int(math.ceil(u ** (-1.0 / alpha)))
    if length > cap:
        length = cap
    return d, length


def levy_step(stream: rng.Stream, grid: GridConfig,
              alpha: float = 1.5) -> tuple:
    """Draw one walk leg; returns (Direction, length)."""
    d, length = _draw_leg(stream.states, 0, alpha, max(grid.width, grid.height))
    return Direction(int(d)), int(length)


def decide_stay(residual: int, k: int, stream: rng.Stream) -> bool:
    """Stay with probability min(residual / k, 1); k >= 1 includes the decider."""
    return stream.u01() < residual / k


@njit(cache=True)
def _pick_weighted(weights, n, u):
    """Index of the first cumulative weight exceeding u * total."""
    total = 0.0
    for i in range(n):
        total += weights[i]
    threshold = u * total
    acc = 0.0
    for i in range(n):
        acc += weights[i]
        if threshold < acc:
            return i
    return n - 1


@njit(cache=True, nogil=True)
def _decide_agents(w, h, radius, t_d, t_rw, alpha, leg_cap, n_agents,
                   states, pol_base, levy_base,
                   a_x, a_y, a_state, a_target, a_counter,
                   a_leg_dir, a_leg_rem, a_forced, a_policy,
                   n_x, n_y, n_state, n_target, n_counter,
                   n_leg_dir, n_leg_rem, n_forced,
                   blacklist,
                   t_x, t_y, t_res, t_alive,
                   live_idx, n_live,
                   f_val, af_idx, n_af,
                   decr, completers,
                   cand_slot, cand_w):
    """Phase one of a round: every agent decides from the round snapshot.

    Reads only the committed (a_*) arrays and writes the staged (n_*)
    arrays, so no decision observes another agent's same-round move.
    Workers tick their block counter (completed blocks queue one decrement
    in decr and the agent id in completers for the release phase); everyone
    else runs the sight check, then their policy branch.  Returns the
    number of completers.
    """
    n_comp = 0
    for a in range(n_agents):
        x = a_x[a]
        y = a_y[a]
        n_x[a] = x
        n_y[a] = y
        n_state[a] = a_state[a]
        n_target[a] = a_target[a]
        n_counter[a] = a_counter[a]
        n_leg_dir[a] = a_leg_dir[a]
        n_leg_rem[a] = a_leg_rem[a]
        n_forced[a] = a_forced[a]

        if a_state[a] == _WORKING:
            c = a_counter[a] + 1
            if c == t_d:
                decr[a_target[a]] += 1
                n_counter[a] = 0
                completers[n_comp] = a
                n_comp += 1
            else:
                n_counter[a] = c
            continue

        pol = a_policy[a]
        rw_mode = pol == _RW or (pol == _HYBRID and a_forced[a] > 0)

        # sight: nearest live non-blacklisted task within the influence
        # radius; ascending ids make equal distances pick the lowest id
        best = -1
        bestd = 1 << 60
        for li in range(n_live):
            s = live_idx[li]
            dx = t_x[s] - x
            dy = t_y[s] - y
            adx = dx if dx >= 0 else -dx
            ady = dy if dy >= 0 else -dy
            ch = adx if adx >= ady else ady
            if ch <= radius and blacklist[a, s] == 0:
                d2 = dx * dx + dy * dy
                if d2 < bestd:
                    bestd = d2
                    best = s
        if best >= 0:
            n_target[a] = best
            n_leg_rem[a] = 0
            if pol == _HYBRID:
                n_forced[a] = 0       # pickup cancels the forced walk
            if bestd == 0:
                n_state[a] = _WORKING
                if t_d == 1:
                    decr[best] += 1
                    n_counter[a] = 0
                    completers[n_comp] = a
                    n_comp += 1
                else:
                    n_counter[a] = 1
            else:
                n_state[a] = _MOVING
                n_counter[a] = 0
                nx, ny = _step_toward(x, y, t_x[best], t_y[best])
                n_x[a] = nx
                n_y[a] = ny
            continue

        n_state[a] = _WALKING
        n_target[a] = -1
        n_counter[a] = 0

        if rw_mode:
            row = levy_base + a
            d = a_leg_dir[a]
            rem = a_leg_rem[a]
            if rem <= 0 or _blocked(x, y, d, w, h):
                d, rem = _draw_leg(states, row, alpha, leg_cap)
            nx, ny = _move(x, y, d, w, h)
            n_x[a] = nx
            n_y[a] = ny
            n_leg_dir[a] = d
            n_leg_rem[a] = rem - 1
            if pol == _HYBRID:
                n_forced[a] = a_forced[a] - 1
            continue

        # prop branch: records name the tasks the agent knows of and carry
        # the last propagated strength; a task that has finished no longer
        # attracts, whatever its record still says
        row = pol_base + a
        nc = 0
        for fi in range(n_af):
            s = af_idx[fi]
            v = f_val[s, y, x]
            if v <= 0 or v == UNKNOWN:
                continue     # no record here, or already erased
            if t_res[s] <= 0:
                continue     # task finished, record is a leftover
            if blacklist[a, s] == 1:
                continue
            dx = t_x[s] - x
            dy = t_y[s] - y
            if dx == 0 and dy == 0:
                continue     # record points at the agent's own vertex
            cand_slot[nc] = s
            cand_w[nc] = v / float(dx * dx + dy * dy)
            nc += 1
        if nc > 0:
            u = rng.u01(states, row)
            pick = cand_slot[_pick_weighted(cand_w, nc, u)]
            nx, ny = _step_toward(x, y, t_x[pick], t_y[pick])
            n_x[a] = nx
            n_y[a] = ny
        else:
            # no usable records: walk exactly like rw (leg resumes where
            # record-following interrupted it)
            lrow = levy_base + a
            d = a_leg_dir[a]
            rem = a_leg_rem[a]
            if rem <= 0 or _blocked(x, y, d, w, h):
                d, rem = _draw_leg(states, lrow, alpha, leg_cap)
            nx, ny = _move(x, y, d, w, h)
            n_x[a] = nx
            n_y[a] = ny
            n_leg_dir[a] = d
            n_leg_rem[a] = rem - 1
    return n_comp


@njit(cache=True, nogil=True)
def _release_phase(radius, t_rw, n_agents,
                   states, pol_base,
                   a_x, a_y, a_state, a_target, a_policy,
                   n_state, n_target, n_counter, n_leg_rem, n_forced,
                   blacklist, t_res,
                   completers, n_comp):
    """Stay-or-leave for every agent that completed a work block this round.

    Runs after decrements were applied, in agent-id order.  The residual is
    the post-decrement value; k counts agents committed to the task
    (working or moving toward it, per the round-start snapshot) within the
    decider's influence radius, itself included.  A leaver blacklists the
    task and re-decides from scratch next round; if the task just finished
    there is nothing to blacklist.  Hybrid agents start a forced walk on
    any departure.
    """
    for ci in range(n_comp):
        a = completers[ci]
        s = a_target[a]
        r = t_res[s]
        if r <= 0:
            n_state[a] = _WALKING
            n_target[a] = -1
            n_counter[a] = 0
            n_leg_rem[a] = 0
            if a_policy[a] == _HYBRID:
                n_forced[a] = t_rw
            continue
        if a_policy[a] == _RW:
            continue      # rw never abandons a live task
        x = a_x[a]
        y = a_y[a]
        k = 0
        for b in range(n_agents):
            if a_target[b] == s and a_state[b] != _WALKING:
                dx = a_x[b] - x
                dy = a_y[b] - y
                adx = dx if dx >= 0 else -dx
                ady = dy if dy >= 0 else -dy
                ch = adx if adx >= ady else ady
                if ch <= radius:
                    k += 1
        if k < 1:
            k = 1
        u = rng.u01(states, pol_base + a)
        if u >= r / k:
            n_state[a] = _WALKING
            n_target[a] = -1
            n_counter[a] = 0
            n_leg_rem[a] = 0
            blacklist[a, s] = 1
            if a_policy[a] == _HYBRID:
                n_forced[a] = t_rw
