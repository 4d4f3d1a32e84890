"""A named, seedable, platform-stable random generator.

SplitMix64 with rejection sampling for uniform ranges; every sampling site
in the package goes through this class so runs are bit-reproducible.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n); rejection sampling, no modulo bias."""
        if n <= 0:
            raise ValueError("empty range")
        limit = ((1 << 64) // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def spawn(self, stream: int) -> "SplitMix64":
        """An independent generator for a numbered shard."""
        return SplitMix64(self.next_u64() ^ (0xA5A5A5A5A5A5A5A5 * (stream + 1)))
