"""Counter-based random substreams.

Every randomized routine takes an explicit generator; experiments derive one
independent generator per (trial, node, purpose) coordinate from a single
master seed. Because a substream depends only on its coordinates, results are
identical under any execution order or worker count.
"""

from __future__ import annotations

import zlib

import numpy as np

_MASK = (1 << 63) - 1


def _word(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & _MASK
    if isinstance(part, str):
        return zlib.crc32(part.encode("utf-8"))
    raise TypeError(f"substream path parts must be int or str, got {type(part)!r}")


def substream(master_seed: int, *path) -> np.random.Generator:
    """Independent generator for the given (master seed, path) coordinate.

    `path` is any mix of small ints and short strings, e.g.
    ``substream(seed, trial, "noise")`` or ``substream(seed, chunk, "readings", node)``.
    """
    entropy = [_word(master_seed)] + [_word(p) for p in path]
    return np.random.default_rng(np.random.SeedSequence(entropy))
