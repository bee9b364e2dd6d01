"""Reproducible block-wise Monte Carlo streams.

Samples are generated in fixed-size blocks.  Block ``k`` draws from a Philox
(counter-based) generator keyed by ``SeedSequence(seed, spawn_key=(k,))``, so
every block's numbers depend only on ``(seed, k)``.  Partial sums are reduced
in block order, which makes estimates independent of the worker count.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

BLOCK_SIZE = 65536


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True)
class MCEstimate:
    value: float
    stderr: float
    samples: int

    def __iter__(self):
        # allows ``est, err = mc_...(...)``
        yield self.value
        yield self.stderr


def blocked_mean(
    sampler: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> MCEstimate:
    """Sample mean and standard error of ``sampler`` over ``samples`` draws.

    ``sampler(rng, n)`` must return ``n`` real values.
    """
    if samples < 1:
        raise ValueError("need at least one Monte Carlo sample")
    n_blocks = -(-samples // block_size)
    sizes = [min(block_size, samples - k * block_size) for k in range(n_blocks)]

    def run(k):
        vals = np.asarray(sampler(block_generator(seed, k), sizes[k]), dtype=float)
        return vals.sum(), (vals * vals).sum()

    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_blocks)))
    else:
        parts = [run(k) for k in range(n_blocks)]
    s1 = 0.0
    s2 = 0.0
    for a, b in parts:  # fixed reduction order
        s1 += a
        s2 += b
    mean = s1 / samples
    if samples > 1:
        var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
        err = float(np.sqrt(var / samples))
    else:
        err = float("inf")
    return MCEstimate(float(mean), err, samples)


def haar_unit_vectors(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Uniform unit vectors in C^dim (first column of a Haar unitary)."""
    z = rng.standard_normal((n, dim)) + 1j * rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def sphere_points(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    """Uniform points on the unit sphere S^{dim-1}."""
    z = rng.standard_normal((n, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
