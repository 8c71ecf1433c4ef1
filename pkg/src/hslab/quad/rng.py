"""Counter-based random streams.

Every block of samples owns an independent Philox stream derived from the run
seed and the block index alone, so results do not depend on how blocks are
scheduled across threads.
"""

from __future__ import annotations

import math

import numpy as np


def block_generator(seed: int, block: int) -> np.random.Generator:
    """Generator for sample block ``block`` of a run keyed by ``seed``."""
    bit_generator = np.random.Philox(key=seed)
    if block:
        bit_generator = bit_generator.jumped(block)
    return np.random.Generator(bit_generator)


def block_sizes(n_samples: int, block_size: int) -> list[int]:
    """Split ``n_samples`` into consecutive blocks of at most ``block_size``."""
    full, rest = divmod(n_samples, block_size)
    return [block_size] * full + ([rest] if rest else [])


def unit_directions(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    """Uniform directions on the unit sphere ``S^{d-1}`` (signs when d=1)."""
    if d == 1:
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)[:, None]
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


def sphere_area(d: int) -> float:
    """Surface area ``ω_{d-1} = 2π^{d/2}/Γ(d/2)`` of the unit sphere in R^d."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)
