"""Counter-based SplitMix64 streams.

Trial ``t`` under seed ``s`` gets its own SplitMix64 generator whose state is
``mix64(s ^ mix64(t * GOLDEN))``. Any trial can be regenerated from
``(seed, t)`` alone, so serial, batched and parallel runs draw identical values.

Bounded integers use the unbiased modulo method: words at or above the
largest multiple of the bound are rejected and the next word is used.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def check_seed(seed: int) -> int:
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned value, got {seed}")
    return seed


def stream_key(seed: int, trial: int) -> int:
    return mix64(seed ^ mix64(trial * GOLDEN))


def rejection_limit(bound: int) -> int:
    return (1 << 64) - (1 << 64) % bound


class SplitMix64:
    def __init__(self, state: int):
        self.state = state & MASK64

    @classmethod
    def for_trial(cls, seed: int, trial: int) -> "SplitMix64":
        return cls(stream_key(check_seed(seed), trial))

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def randbelow(self, bound: int) -> int:
        limit = rejection_limit(bound)
        while True:
            w = self.next_u64()
            if w < limit:
                return w % bound

    def draw(self, count: int, bound: int) -> list[int]:
        return [self.randbelow(bound) for _ in range(count)]


def _mix64_np(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def batch_draw(seed: int, start: int, count: int, draws: int, bound: int) -> np.ndarray:
    """Rows ``start .. start+count-1``: the first ``draws`` bounded values of each trial.

    Equivalent to ``SplitMix64.for_trial(seed, t).draw(draws, bound)`` per row.
    """
    check_seed(seed)
    trials = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        keys = _mix64_np(trials * np.uint64(GOLDEN)) ^ np.uint64(seed)
        keys = _mix64_np(keys)
        steps = np.arange(1, draws + 1, dtype=np.uint64) * np.uint64(GOLDEN)
        words = _mix64_np(keys[:, None] + steps[None, :])
    limit = rejection_limit(bound)
    out = (words % np.uint64(bound)).astype(np.int64)
    if limit < 1 << 64:
        # Rare: some word needed rejection, so redo those trials word by word.
        for row in np.nonzero((words >= np.uint64(limit)).any(axis=1))[0]:
            out[row] = SplitMix64.for_trial(seed, start + int(row)).draw(draws, bound)
    return out
