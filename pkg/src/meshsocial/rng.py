"""SplitMix64: the single source of randomness for every experiment.

All stochastic choices (topology synthesis, random removal orders, CBR
phases, baseline ticket counts) are derived from an integer seed through
this generator, so a run is a pure function of its inputs.
"""

from __future__ import annotations

from typing import MutableSequence, TypeVar

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

T = TypeVar("T")


def mix64(x: int) -> int:
    """SplitMix64 finalizer (Stafford variant 13). mix64(0) == 0."""
    x &= MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & MASK64
    x ^= x >> 31
    return x


def derive_seed(seed: int, *salts: int) -> int:
    """Combine a seed with integer salts into a new 64-bit seed."""
    x = seed & MASK64
    for s in salts:
        x = mix64(x ^ mix64((s + GOLDEN_GAMMA) & MASK64))
    return x


class SplitMix64:
    """Sequential 64-bit generator; state advances by the golden gamma."""

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) without modulo bias."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def shuffle(self, seq: MutableSequence[T]) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(seq) - 1, 0, -1):
            j = self.randbelow(i + 1)
            seq[i], seq[j] = seq[j], seq[i]
