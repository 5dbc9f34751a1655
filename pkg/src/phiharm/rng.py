"""Seeded, platform-independent random numbers for reproducible experiments.

A plain 64-bit linear congruential generator so that runs reproduce bit-for-bit
across platforms and language runtimes:

    state_{n+1} = (A * state_n + C) mod 2**64

with Knuth's MMIX constants A = 6364136223846793005, C = 1442695040888963407.
Uniform floats take the top 53 bits of the state, i.e.
u = (state >> 11) * 2**-53 in [0, 1), then map affinely onto [lo, hi).
"""

_A = 6364136223846793005
_C = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg64:
    """Deterministic 64-bit LCG; the only randomness source used by the CLI."""

    def __init__(self, seed: int):
        if seed < 0:
            raise ValueError("seed must be a non-negative 64-bit integer")
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (_A * self.state + _C) & _MASK
        return self.state

    def uniform(self, lo: float = -1.0, hi: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u

    def uniforms(self, n: int, lo: float = -1.0, hi: float = 1.0) -> list[float]:
        return [self.uniform(lo, hi) for _ in range(n)]
