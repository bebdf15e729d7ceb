"""Deterministic random streams for the simulator.

Every trial owns a family of independent substreams, one per concern:
arrivals at a vertex, demands at a vertex, one agent's policy draws, one
agent's walk-leg draws, and world initialization.  Keeping the concerns on
separate streams means adding a draw to one of them never perturbs the
others, which is what makes paired (common-random-numbers) comparisons
across algorithms possible.

The generator is xoshiro256** (Blackman & Vigna), a small xorshift-family
PRNG implemented here with plain 64-bit integer arithmetic so results are
identical across platforms.  Stream states are derived from the trial seed
with the splitmix64 finalizer over a (kind, entity) label, the standard
seeding recipe for xoshiro.  No platform RNG is used anywhere.

State layout: each stream is one row of a (n_streams, 4) uint64 array.  The
jitted samplers below mutate a row in place; the Stream class wraps a single
row for convenience when a stream is used on its own.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Stream kinds.  The label (kind, entity) is hashed into the seed material,
# so the mapping below is part of the reproducibility contract.
ARRIVALS = 1   # entity = vertex index
DEMANDS = 2    # entity = vertex index
POLICY = 3     # entity = agent id
LEVY = 4       # entity = agent id
INIT = 5       # entity = 0

U64 = np.uint64
GAMMA = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_MASK64 = 0xFFFFFFFFFFFFFFFF


@njit(cache=True)
def mix64(z):
    """splitmix64 finalizer: avalanche a 64-bit value."""
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    return z ^ (z >> U64(31))


@njit(cache=True)
def seed_stream(states, row, trial_seed, kind, entity):
    """Initialize one xoshiro256** state row from (trial_seed, kind, entity)."""
    label = (U64(kind) << U64(56)) | U64(entity)
    h = mix64(U64(trial_seed) ^ mix64(label))
    acc = h
    nonzero = False
    for i in range(4):
        acc = acc + GAMMA
        w = mix64(acc)
        states[row, i] = w
        if w != U64(0):
            nonzero = True
    if not nonzero:
        # xoshiro must never start from the all-zero state
        states[row, 0] = GAMMA


@njit(cache=True)
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True)
def next_u64(states, row):
    """One xoshiro256** step on the given state row."""
    s1 = states[row, 1]
    result = _rotl(s1 * U64(5), U64(7)) * U64(9)
    t = s1 << U64(17)
    states[row, 2] ^= states[row, 0]
    states[row, 3] ^= s1
    states[row, 1] ^= states[row, 2]
    states[row, 0] ^= states[row, 3]
    states[row, 2] ^= t
    states[row, 3] = _rotl(states[row, 3], U64(45))
    return result


@njit(cache=True)
def u01(states, row):
    """Uniform double in [0, 1): top 53 bits of the next output."""
    return (next_u64(states, row) >> U64(11)) * 1.1102230246251565e-16


@njit(cache=True)
def exponential(states, row, mean):
    """Exponential draw with the given mean (inverse-CDF on 1 - u > 0)."""
    return -mean * math.log(1.0 - u01(states, row))


@njit(cache=True)
def normal(states, row, mu, sigma):
    """Normal draw via one Box-Muller pair (cosine branch, pair not cached)."""
    u1 = 1.0 - u01(states, row)   # (0, 1], keeps the log finite
    u2 = u01(states, row)
    return mu + sigma * math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


@njit(cache=True)
def randint(states, row, n):
    """Uniform integer in [0, n)."""
    k = int(u01(states, row) * n)
    if k >= n:
        k = n - 1
    return k


@njit(cache=True)
def round_half_up(x):
    """Nearest integer with .5 rounded up; used for every 'round to integer'."""
    return int(math.floor(x + 0.5))


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    """Trial seed = splitmix64 sequence over the master seed.

    Pure-python on purpose: callers pass arbitrary ints, and the masked
    arithmetic below is the documented derivation.
    """
    z = (master_seed + (trial_index + 1) * int(GAMMA)) & _MASK64
    return int(mix64(U64(z)))


class Stream:
    """A single named stream, for use outside the packed world arrays."""

    def __init__(self, trial_seed: int, kind: int, entity: int = 0):
        self.states = np.zeros((1, 4), dtype=np.uint64)
        seed_stream(self.states, 0, U64(trial_seed & _MASK64), kind, entity)

    def next_u64(self) -> int:
        return int(next_u64(self.states, 0))

    def u01(self) -> float:
        return float(u01(self.states, 0))

    def exponential(self, mean: float) -> float:
        return float(exponential(self.states, 0, mean))

    def normal(self, mu: float, sigma: float) -> float:
        return float(normal(self.states, 0, mu, sigma))

    def randint(self, n: int) -> int:
        return int(randint(self.states, 0, n))
