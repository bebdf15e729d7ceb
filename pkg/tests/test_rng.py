"""Generator correctness: reference vectors, stream keying, distributions."""

import math

import numpy as np
import pytest

from swarmtask.rng import (ARRIVALS, DEMANDS, LEVY, POLICY, Stream,
                           derive_trial_seed, next_u64, round_half_up, u01)

# canonical first outputs of xoshiro256** from the state (1, 2, 3, 4)
XOSHIRO_REF = [11520, 0, 1509978240, 1215971899390074240, 1216172134540287360]

_M64 = (1 << 64) - 1


def _xoshiro_ref(state, n):
    """Independent plain-integer reimplementation used as a cross-check."""
    def rotl(x, k):
        return ((x << k) | (x >> (64 - k))) & _M64

    s = list(state)
    out = []
    for _ in range(n):
        out.append((rotl((s[1] * 5) & _M64, 7) * 9) & _M64)
        t = (s[1] << 17) & _M64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = rotl(s[3], 45)
    return out


def test_xoshiro_reference_sequence():
    states = np.array([[1, 2, 3, 4]], dtype=np.uint64)
    assert [int(next_u64(states, 0)) for _ in range(5)] == XOSHIRO_REF


def test_xoshiro_matches_independent_implementation():
    seed_state = [int(x) for x in Stream(987654321, POLICY, 17).states[0]]
    stream = Stream(987654321, POLICY, 17)
    got = [stream.next_u64() for _ in range(64)]
    assert got == _xoshiro_ref(seed_state, 64)


def test_derive_trial_seed_splitmix_vector():
    # derive(0, 0) is the first output of splitmix64 seeded with 0
    assert derive_trial_seed(0, 0) == 0xE220A8397B1DCDAF


def test_derive_trial_seed_is_deterministic_and_spread():
    seeds = [derive_trial_seed(12345, i) for i in range(100)]
    assert seeds == [derive_trial_seed(12345, i) for i in range(100)]
    assert len(set(seeds)) == 100
    assert all(0 <= s <= _M64 for s in seeds)


def test_streams_keyed_by_kind_and_entity():
    base = [Stream(42, ARRIVALS, 3).next_u64() for _ in range(8)]
    assert base == [Stream(42, ARRIVALS, 3).next_u64() for _ in range(8)]
    assert base != [Stream(42, DEMANDS, 3).next_u64() for _ in range(8)]
    assert base != [Stream(42, ARRIVALS, 4).next_u64() for _ in range(8)]
    assert base != [Stream(43, ARRIVALS, 3).next_u64() for _ in range(8)]


def test_u01_range_and_reproducibility():
    states = np.array([[1, 2, 3, 4]], dtype=np.uint64)
    vals = [float(u01(states, 0)) for _ in range(10000)]
    assert all(0.0 <= v < 1.0 for v in vals)
    # top-53-bit construction: first value is XOSHIRO_REF[0] >> 11 scaled
    assert vals[0] == (XOSHIRO_REF[0] >> 11) * 2.0 ** -53


def test_uniform_moments():
    s = Stream(7, POLICY, 0)
    xs = np.array([s.u01() for _ in range(100000)])
    assert abs(xs.mean() - 0.5) < 0.005
    assert abs(xs.var() - 1 / 12) < 0.002


def test_exponential_moments():
    s = Stream(11, ARRIVALS, 0)
    xs = np.array([s.exponential(10.0) for _ in range(100000)])
    assert abs(xs.mean() - 10.0) < 0.2
    assert abs(xs.std() - 10.0) < 0.3
    assert (xs >= 0).all()


def test_normal_moments():
    s = Stream(13, DEMANDS, 0)
    xs = np.array([s.normal(3.0, 2.0) for _ in range(100000)])
    assert abs(xs.mean() - 3.0) < 0.05
    assert abs(xs.std() - 2.0) < 0.05


def test_randint_uniform():
    s = Stream(17, LEVY, 0)
    xs = np.array([s.randint(4) for _ in range(100000)])
    assert set(xs) == {0, 1, 2, 3}
    for d in range(4):
        assert abs((xs == d).mean() - 0.25) < 0.01


@pytest.mark.parametrize("x,expected", [
    (0.0, 0), (0.4, 0), (0.5, 1), (1.5, 2), (2.5, 3), (2.49, 2),
    (-0.5, 0), (-0.51, -1), (-1.5, -1), (6.0, 6),
])
def test_round_half_up(x, expected):
    assert round_half_up(x) == expected


def test_round_half_up_matches_floor_identity():
    for x in np.linspace(-4, 4, 1000):
        assert round_half_up(float(x)) == math.floor(x + 0.5)
