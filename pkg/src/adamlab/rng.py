"""Deterministic random streams for reshuffling experiments.

Everything here is pure-integer arithmetic on Python ints, so results are
bit-identical across platforms and Python versions. The generator is
SplitMix64 (Steele/Lea/Flood mixing constants); shuffles are Fisher-Yates
with rejection-sampled bounded draws, so no modulo bias.

Algorithm identifier echoed into configs and reports: ``ALGORITHM_ID``.
"""

from __future__ import annotations

ALGORITHM_ID = "splitmix64/fisher-yates-v1"

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    """SplitMix64 output scrambler (finalizer only, no state advance)."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Counter-based 64-bit generator with a tiny API.

    State advances by the 64-bit golden gamma; outputs pass through the
    standard two-multiply scrambler.
    """

    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        return _mix64(self._state)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling (no bias)."""
        if n <= 0:
            raise ValueError("randbelow needs n >= 1")
        if n == 1:
            return 0
        # largest multiple of n that fits in 64 bits
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next_u64()
            if r < limit:
                return r % n

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def shuffle(self, seq: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def permutation(self, n: int) -> list[int]:
        out = list(range(n))
        self.shuffle(out)
        return out


def stream_for_run(seed: int, run_index: int = 0) -> SplitMix64:
    """Derive an independent stream from a base seed and a run index.

    Both inputs are scrambled separately, then combined, so neighbouring
    seeds or run indices do not give correlated streams. Same (seed,
    run_index) always gives the same stream.
    """
    if seed < 0 or run_index < 0:
        raise ValueError("seed and run_index must be non-negative")
    root = _mix64(seed & _MASK64)
    sub = _mix64((run_index & _MASK64) ^ _GOLDEN)
    return SplitMix64(root ^ sub)
