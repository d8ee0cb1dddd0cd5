"""Deterministic derivation of child seeds from a base seed and a key path.

Every source of randomness in the package is a `numpy` generator seeded
through this helper, so results are reproducible and independent of
execution order or parallelism.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed"]


def _encode(part: int | str) -> int:
    if isinstance(part, bool):  # bool is an int subclass; keep 0/1 explicit
        return int(part)
    if isinstance(part, int):
        if part < 0:
            raise ValueError("seed key parts must be non-negative")
        return part
    if isinstance(part, str):
        return int.from_bytes(hashlib.sha256(part.encode()).digest()[:4], "big")
    raise TypeError(f"unsupported seed key part: {part!r}")


def derive_seed(base: int, *key: int | str) -> int:
    """Return a child seed that is a pure function of `base` and `key`."""
    ss = np.random.SeedSequence(entropy=base, spawn_key=tuple(_encode(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
