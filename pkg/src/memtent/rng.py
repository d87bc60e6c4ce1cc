"""Seeded random streams.

Every draw comes from a Philox (counter-based) generator keyed by
``(seed, stream, index)``, so a sample's value depends only on its position,
never on how the work was split between workers.
"""

from __future__ import annotations

import math

import numpy as np

# stream ids
STARTS = 1
FIBERS = 2
SEGMENT = 3
TUBE = 4
PAIRS = 5
CHECKS = 6

BLOCK = 4096


def generator(seed: int, *keys: int) -> np.random.Generator:
    if seed < 0 or seed >= 2 ** 64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def uniform_block(seed: int, stream: int, block: int, size: int = BLOCK, dim: int = 2) -> np.ndarray:
    return generator(seed, stream, block).random((size, dim))


def uniform_points(seed: int, stream: int, count: int, dim: int = 2, first: int = 0) -> np.ndarray:
    """Samples first..first+count-1 of a stream; shape (count, dim)."""
    if count <= 0:
        return np.empty((0, dim))
    b0, b1 = first // BLOCK, (first + count - 1) // BLOCK
    blocks = np.concatenate([uniform_block(seed, stream, b, BLOCK, dim) for b in range(b0, b1 + 1)])
    off = first - b0 * BLOCK
    return blocks[off:off + count]


def random_starts(count: int, seed: int) -> np.ndarray:
    """Uniform start points in the open square; start i depends only on (seed, i)."""
    out = np.empty((count, 2))
    for i in range(count):
        out[i] = generator(seed, STARTS, i).random(2)
    return out


def grid_starts(count: int) -> np.ndarray:
    """First ``count`` cell centers of the smallest k x k grid holding them."""
    k = math.ceil(math.sqrt(count))
    c = (np.arange(k) + 0.5) / k
    gx, gy = np.meshgrid(c, c)
    return np.column_stack([gx.ravel(), gy.ravel()])[:count]


def derive_seed(seed: int, *keys: int) -> int:
    """A child 64-bit seed, e.g. one per verification check."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, dtype=np.uint64)[0])
