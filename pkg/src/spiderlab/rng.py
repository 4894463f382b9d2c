"""Counter-based random streams, one independent stream per path.

Every random word is a pure function of (seed, path index, step counter), so
results do not depend on scheduling: any worker can produce the word for any
(path, step) pair, and replaying a single path in isolation reproduces the
exact draws it saw inside a batch run.

The generator is a splitmix64-style hash chain.  It is not cryptographic, just
a well-mixed bijection; statistical quality is exercised by the rib-frequency
and known-expectation tests.
"""

from __future__ import annotations

import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_GOLD = 0x9E3779B97F4A7C15
_PATH_MULT = 0xD1342543DE82EF95

# float in [0, 1) from the top 53 bits
_INV53 = 2.0 ** -53


def mix64(z: int) -> int:
    """splitmix64 finalizer on Python ints (reference implementation)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * _M1) & _MASK
    z = ((z ^ (z >> 27)) * _M2) & _MASK
    return z ^ (z >> 31)


def path_key(seed: int, path_index: int) -> int:
    """64-bit stream key for one path."""
    return mix64((seed * _GOLD + path_index * _PATH_MULT) & _MASK)


def word(key: int, counter: int) -> int:
    """Random 64-bit word number `counter` of the stream with key `key`."""
    return mix64(key ^ ((counter * _GOLD) & _MASK))


def uniform_from_word(w: int) -> float:
    return (w >> 11) * _INV53


class PathStream:
    """Sequential view of one path's counter-based stream.

    Consuming uniforms advances an internal counter; `uniform()` number k
    equals `uniform_from_word(word(path_key(seed, path), k))`.
    """

    __slots__ = ("key", "counter")

    def __init__(self, seed: int, path_index: int = 0):
        self.key = path_key(seed, path_index)
        self.counter = 0

    def uniform(self) -> float:
        u = uniform_from_word(word(self.key, self.counter))
        self.counter += 1
        return u


def path_keys_array(seed: int, n_paths: int) -> np.ndarray:
    """Vectorized path_key for paths 0..n_paths-1 (uint64 array)."""
    idx = np.arange(n_paths, dtype=np.uint64)
    base = np.uint64((seed * _GOLD) & _MASK)  # scalar part in python ints, no overflow warning
    z = base + idx * np.uint64(_PATH_MULT)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))
