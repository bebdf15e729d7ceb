"""Vertex-resident propagators: sensing and periodic diffusion of task records.

One immobile propagator sits on every vertex.  A record is (task location,
residual demand), keyed by task id so a later task at a recycled location
never merges against a stale record.  The propagator co-located with a task
re-senses the live residual every round (ground truth at the source).  On
every round divisible by prop_period, each propagator forwards the records
that changed since its last exchange ("fresh" records) to all propagators
within Chebyshev radius prop_radius, subject to the receiver sitting within
Euclidean prop_max_dist of the task; receivers keep the minimum residual
(newer information, since residuals never grow) and a record becomes fresh
again only when its stored value changed.  A residual-0 record is forwarded
exactly once and then dropped, so completion sweeps outward and erases the
task from every propagator it ever reached.

Storage is one lattice of int32 values per task: UNKNOWN means no record,
DROPPED marks a vertex that already forwarded the task's completion.  The
per-task fresh list plus a stamp lattice (for dedup) make each exchange cost
proportional to the active front, not the grid.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, Optional, Set, Tuple

from numba import njit

from .grid import Position

if TYPE_CHECKING:
    from .engine import WorldState

UNKNOWN = 2147483647     # int32 max: vertex holds no record for the task
DROPPED = -1             # completion already forwarded; ignore all deliveries


@dataclass(frozen=True)
class TaskInfo:
    """One propagator's knowledge of one task."""

    task_location: Position
    residual: int


def merge(existing: Optional[TaskInfo], incoming: TaskInfo) -> TaskInfo:
    """Min-residual merge of two records for the same task.

    The lower residual is the newer information.  Callers detect freshness
    by comparing the result against what was stored (changed or new means
    fresh); a result of 0 is kept only until it has been forwarded once.
    """
    if existing is None or incoming.residual < existing.residual:
        return incoming
    return existing


@njit(cache=True, nogil=True)
def _sense(w, t_x, t_y, t_res, t_alive,
           f_val, f_fresh, f_nfresh, f_src_fresh, af_idx, n_af):
    """Refresh each active field's source vertex from ground truth.

    A live task overwrites the source record whenever the stored value
    differs; a task that disappeared writes one final 0 (the erasure wave).
    The source enters the fresh list at most once between exchanges.
    """
    for fi in range(n_af):
        s = af_idx[fi]
        tx = t_x[s]
        ty = t_y[s]
        stored = f_val[s, ty, tx]
        if t_alive[s] == 1:
            cur = t_res[s]
            if stored != cur:
                f_val[s, ty, tx] = cur
                if f_src_fresh[s] == 0:
                    f_fresh[s, f_nfresh[s]] = ty * w + tx
                    f_nfresh[s] += 1
                    f_src_fresh[s] = 1
        else:
            if stored > 0 and stored != UNKNOWN:
                f_val[s, ty, tx] = 0
                if f_src_fresh[s] == 0:
                    f_fresh[s, f_nfresh[s]] = ty * w + tx
                    f_nfresh[s] += 1
                    f_src_fresh[s] = 1


@njit(cache=True, nogil=True)
def _broadcast(w, h, i_p, dp2,
               t_x, t_y, t_alive,
               f_val, f_fresh, f_nfresh, f_src_fresh, f_active,
               af_idx, n_af, stamp, counters, scr_xy, scr_val):
    """One synchronous exchange: every fresh record moves <= i_p cells.

    Deliveries use the pre-exchange values (scr_val snapshot), so the result
    is independent of processing order.  Receivers improved by the exchange
    form the next fresh list; a cell whose snapshot value was 0 forwards it
    and drops to DROPPED.  Returns the number of fields that went quiet
    (task gone and nothing left to forward).
    """
    deactivated = 0
    for fi in range(n_af):
        s = af_idx[fi]
        n_in = f_nfresh[s]
        if n_in > 0:
            tx = t_x[s]
            ty = t_y[s]
            counters[3] += 1
            sc = counters[3]
            for idx in range(n_in):
                p = f_fresh[s, idx]
                scr_val[idx] = f_val[s, p // w, p % w]
            n_out = 0
            for idx in range(n_in):
                p = f_fresh[s, idx]
                py = p // w
                px = p - py * w
                val = scr_val[idx]
                if val < 0:
                    continue
                ylo = py - i_p
                if ylo < 0:
                    ylo = 0
                yhi = py + i_p
                if yhi >= h:
                    yhi = h - 1
                xlo = px - i_p
                if xlo < 0:
                    xlo = 0
                xhi = px + i_p
                if xhi >= w:
                    xhi = w - 1
                for qy in range(ylo, yhi + 1):
                    ddy = qy - ty
                    for qx in range(xlo, xhi + 1):
                        if qx == px and qy == py:
                            continue
                        ddx = qx - tx
                        if float(ddx * ddx + ddy * ddy) > dp2:
                            continue
                        if val < f_val[s, qy, qx]:
                            f_val[s, qy, qx] = val
                            if stamp[qy, qx] != sc:
                                stamp[qy, qx] = sc
                                scr_xy[n_out] = qy * w + qx
                                n_out += 1
                if val == 0:
                    f_val[s, py, px] = DROPPED
            for idx in range(n_out):
                f_fresh[s, idx] = scr_xy[idx]
            f_nfresh[s] = n_out
            f_src_fresh[s] = 0
        if t_alive[s] == 0 and f_nfresh[s] == 0 and f_active[s] == 1:
            f_active[s] = 0
            deactivated += 1
    return deactivated


def records_at(world: "WorldState", x: int, y: int) -> Dict[int, TaskInfo]:
    """All records the propagator at (x, y) currently stores, by task id."""
    out: Dict[int, TaskInfo] = {}
    n = int(world.counters[0])
    for s in range(n):
        v = int(world.f_val[s, y, x]) if world.f_val.shape[0] else UNKNOWN
        if v != UNKNOWN and v != DROPPED:
            out[s] = TaskInfo(Position(int(world.t_x[s]), int(world.t_y[s])), v)
    return out


def fresh_ids_at(world: "WorldState", x: int, y: int) -> Set[int]:
    """Task ids whose record at (x, y) changed since the last exchange."""
    out: Set[int] = set()
    packed = y * world.cfg.width + x
    for s in range(int(world.counters[0])):
        for idx in range(int(world.f_nfresh[s])):
            if int(world.f_fresh[s, idx]) == packed:
                out.add(s)
                break
    return out


@dataclass
class PropagatorView:
    position: Position
    known: Dict[int, TaskInfo]
    fresh: Set[int]


def propagator_at(world: "WorldState", x: int, y: int) -> PropagatorView:
    return PropagatorView(Position(x, y), records_at(world, x, y),
                          fresh_ids_at(world, x, y))


def informed_set(world: "WorldState", task_id: int) -> Set[Tuple[int, int]]:
    """Vertices currently holding a record for the task (any residual)."""
    out: Set[Tuple[int, int]] = set()
    if not world.f_val.shape[0]:
        return out
    plane = world.f_val[task_id]
    for y in range(world.cfg.height):
        for x in range(world.cfg.width):
            v = int(plane[y, x])
            if v != UNKNOWN and v != DROPPED:
                out.add((x, y))
    return out
