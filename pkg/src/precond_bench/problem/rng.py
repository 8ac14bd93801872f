"""
Bit-exact pseudo-random stream: xoshiro256++ seeded by splitmix64.

Right-hand sides depend only on this stream and are identical on every
platform and numpy release.
"""

import numpy as np

from precond_bench.types import Vector

MASK64 = (1 << 64) - 1
DOUBLE_UNIT = 2.0 ** -53


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    """Seed expander; also usable as a small generator on its own."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


class Xoshiro256pp:
    """xoshiro256++ with a splitmix64-expanded state."""

    def __init__(self, seed: int):
        expander = SplitMix64(seed)
        self.s = [expander.next() for _ in range(4)]

    def next(self) -> int:
        s0, s1, s2, s3 = self.s
        result = (_rotl((s0 + s3) & MASK64, 23) + s0) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self.s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next() >> 11) * DOUBLE_UNIT

    def uniform_vector(self, n: int) -> Vector:
        return np.fromiter((self.uniform() for _ in range(n)), dtype=np.float64, count=n)


__all__ = ["SplitMix64", "Xoshiro256pp"]
