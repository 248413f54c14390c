"""Deterministic, independently splittable RNG streams.

Every randomized routine takes a user-facing integer seed and derives its
generator from (seed, label...) so that distinct subsystems never share a
stream and runs are reproducible bit-for-bit across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def seed_sequence(seed: int, *labels: object) -> np.random.SeedSequence:
    """A SeedSequence keyed by the seed plus hashed string labels."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for label in labels:
        digest = hashlib.sha256(str(label).encode("utf-8")).digest()
        entropy.append(int.from_bytes(digest[:8], "big"))
    return np.random.SeedSequence(entropy)


def rng_for(seed: int, *labels: object) -> np.random.Generator:
    """A fresh Generator for the (seed, labels) stream."""
    return np.random.default_rng(seed_sequence(seed, *labels))
