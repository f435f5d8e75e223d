"""Reproducible random-number streams.

Every Monte Carlo replicate gets its own (seed, stream) pair so that serial
and parallel executions consume independent, bit-reproducible PCG64 streams.
"""
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RngStream:
    """A named substream of a global seed: identical pairs reproduce identical draws."""

    seed: int
    stream: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed, *path) -> int:
    """Fold (seed, *path) into a fresh 64-bit seed for an independent experiment cell."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, np.uint64)[0])
