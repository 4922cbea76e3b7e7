"""Small internal helpers shared across modules."""

from __future__ import annotations

import numpy as np


def as_rng(seed_or_rng) -> np.random.Generator:
    """Accept an int seed, a SeedSequence, a Generator, or None."""
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)
