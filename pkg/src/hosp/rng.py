"""Seeded counter-based random numbers.

The stream is SplitMix64 evaluated in counter mode: draw ``i`` (0-based) of a
generator seeded with ``s`` is ``mix64(s + (i + 1) * 0x9E3779B97F4A7C15)``
(all arithmetic mod 2**64).  Uniform doubles keep the top 53 bits,
``u = (x >> 11) * 2**-53``.  Normals come in Box-Muller pairs built from two
consecutive uniforms ``(u1, u2)``::

    r = sqrt(-2 log(1 - u1));  z0 = r cos(2 pi u2);  z1 = r sin(2 pi u2)

An odd request discards the trailing ``z1``.  Because every value depends only
on ``(seed, counter)``, the stream can be reproduced in any language.
"""

from __future__ import annotations

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK64 = (1 << 64) - 1


def _mix64(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    """SplitMix64 in counter mode. ``seed`` is any integer, reduced mod 2**64."""

    def __init__(self, seed: int = 0):
        self.seed = int(seed) & _MASK64
        self.counter = 0

    def raw(self, n: int) -> np.ndarray:
        """Next ``n`` raw 64-bit outputs."""
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            return _mix64(np.uint64(self.seed) + idx * _GAMMA)

    def uniform(self, size: int | tuple[int, ...] = 1, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape))
        u = (self.raw(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return (low + (high - low) * u).reshape(shape)

    def normal(self, size: int | tuple[int, ...] = 1, scale: float = 1.0) -> np.ndarray:
        shape = (size,) if isinstance(size, int) else tuple(size)
        n = int(np.prod(shape))
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        r = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
        z = np.empty((pairs, 2))
        z[:, 0] = r * np.cos(2.0 * np.pi * u[:, 1])
        z[:, 1] = r * np.sin(2.0 * np.pi * u[:, 1])
        return scale * z.ravel()[:n].reshape(shape)

    def signs(self, n: int) -> np.ndarray:
        """Random +-1 vector (one raw draw per entry, sign from the top bit)."""
        return np.where(self.raw(n) >> np.uint64(63), -1.0, 1.0)
