import hashlib

import numpy as np


def derive_seed(master_seed, lane):
    """Sub-seed of a named lane: the first 8 bytes of sha256("<seed>/<lane>")."""
    digest = hashlib.sha256(f'{master_seed}/{lane}'.encode('utf-8')).digest()
    return int.from_bytes(digest[:8], 'big')


def lane_rng(master_seed, lane):
    return np.random.default_rng(derive_seed(master_seed, lane))


class RngLanes:
    """
    Independent random streams of one run, keyed by lane name.

    A lane always yields the same generator object within a run, so draws on
    one lane never shift the stream of another.
    """

    def __init__(self, master_seed):
        if master_seed < 0:
            raise ValueError('master_seed must be non-negative')
        self.master_seed = master_seed
        self._lanes = {}

    def __getitem__(self, lane):
        if lane not in self._lanes:
            self._lanes[lane] = lane_rng(self.master_seed, lane)
        return self._lanes[lane]

    def __contains__(self, lane):
        return lane in self._lanes
