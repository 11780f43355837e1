"""Deterministic RNG with named substreams.

Every stochastic step in the pipeline (parameter init, k-means seeding, SBM
sampling) draws from its own named stream, so results do not depend on the
order in which components consume randomness.
"""

import hashlib

import numpy as np


def _name_digest(name):
    h = hashlib.blake2b(name.encode("utf-8"), digest_size=16).digest()
    return [int.from_bytes(h[:8], "little"), int.from_bytes(h[8:], "little")]


class Rng:
    """Seeded source of independent named substreams."""

    def __init__(self, seed):
        self.seed = int(seed)

    def stream(self, name):
        """A fresh numpy Generator determined by (seed, name) alone."""
        entropy = [self.seed & 0xFFFFFFFFFFFFFFFF] + _name_digest(name)
        return np.random.default_rng(np.random.SeedSequence(entropy))

    def __repr__(self):
        return f"Rng(seed={self.seed})"
