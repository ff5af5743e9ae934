"""Counter-based random number generation.

All randomness in the package flows through Philox generators created
here from explicit integer seeds; nothing touches numpy's global state.
"""

from __future__ import annotations

import numpy as np

_SEED_MAX = 2**63


def make_rng(seed: int) -> np.random.Generator:
    """Create a counter-based generator keyed by ``seed``."""
    return np.random.Generator(np.random.Philox(key=seed))


def spawn_seeds(seed: int, n: int) -> list[int]:
    """Derive ``n`` statistically independent child seeds from ``seed``."""
    children = np.random.SeedSequence(seed).spawn(n)
    return [int(c.generate_state(1, np.uint64)[0] % _SEED_MAX) for c in children]


def next_seed(rng: np.random.Generator) -> int:
    """Draw a fresh child seed from an existing stream."""
    return int(rng.integers(_SEED_MAX))
