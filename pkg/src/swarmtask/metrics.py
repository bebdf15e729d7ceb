"""The two trial metrics: mean unsatisfied demand and completion time.

mu_unsatisfied is the average over rounds of D_t, the post-commit sum of
residual demands (tasks spawned in round t count from round t; tasks
finished in round t no longer count).  mu_completion averages t_i / d_i over
completed tasks, where t_i is rounds from spawn to completion and d_i the
original demand; it is absent, not zero, when nothing completed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, List, Optional, Tuple

if TYPE_CHECKING:
    from .engine import WorldState


@dataclass
class MetricsAccumulator:
    rounds_observed: int = 0
    unsatisfied_sum: int = 0
    completions: List[Tuple[int, int]] = field(default_factory=list)  # (d_i, t_i)
    spawned_count: int = 0

    def record_round(self, world: "WorldState") -> "MetricsAccumulator":
        """Add the current post-commit residual sum; call once per round."""
        self.unsatisfied_sum += world.unsatisfied_now
        self.rounds_observed += 1
        return self

    def record_completion(self, demand: int, spawn_round: int,
                          completion_round: int) -> "MetricsAccumulator":
        self.completions.append((demand, completion_round - spawn_round))
        return self

    def finalize(self) -> Tuple[float, Optional[float], int]:
        """Returns (mu_unsatisfied, mu_completion or None, completion count)."""
        if self.rounds_observed < 1:
            raise ValueError("no rounds recorded")
        mu_unsat = self.unsatisfied_sum / self.rounds_observed
        s = len(self.completions)
        if s == 0:
            return mu_unsat, None, 0
        mu_comp = sum(t_i / d_i for d_i, t_i in self.completions) / s
        return mu_unsat, mu_comp, s
