"""Named, reproducible random streams.

Every random decision in the package draws from a PCG64 generator whose
seed sequence is built from the user seed plus a path of names/integers,
e.g. ``stream(7, "placement", 3)``. Two different paths never share state,
so adding a new consumer cannot perturb existing ones.
"""

from __future__ import annotations

import zlib

import numpy as np


def _key(part: int | str) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    if part < 0:
        raise ValueError(f"stream path components must be non-negative, got {part}")
    return int(part)


def stream(seed: int, *path: int | str) -> np.random.Generator:
    """Return a fresh generator for ``seed`` and the named sub-stream ``path``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF, *(_key(p) for p in path)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
