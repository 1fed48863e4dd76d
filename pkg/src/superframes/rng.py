"""Seeded counter-based random streams.

Every random draw in the package comes from Philox4x64-10, keyed directly by
the user seed (``key = (seed, 0)``, counter starting at zero), through
``numpy.random.Philox``. Uniform doubles are ``(x >> 11) * 2**-53`` of the
successive 64-bit outputs, which is what ``Generator.random`` does. Keying
directly (rather than through ``SeedSequence``) keeps the stream
reproducible from the published algorithm alone.
"""
from __future__ import annotations

import numpy as np

from .errors import ValidationError

_U64 = (1 << 64) - 1


def philox(seed: int) -> np.random.Generator:
    seed = int(seed)
    if seed < 0 or seed > _U64:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=np.array([seed, 0], dtype=np.uint64)))


def uniforms(seed: int, n: int) -> np.ndarray:
    """First ``n`` uniform doubles in [0, 1) of the stream for ``seed``."""
    return philox(seed).random(n)
