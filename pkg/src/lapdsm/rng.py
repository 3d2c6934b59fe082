"""Portable counter-based random number generation.

All stochastic pieces of the package (measurement noise, training batches,
network initialization) draw from this generator so that two runs with the
same seed produce byte-identical outputs, independent of numpy's global
state or its generator versioning.

The generator is SplitMix64 used in counter mode: output ``i`` of stream
``s`` under seed ``q`` is ``mix(mix(q) ^ mix(s * PHI) + i * PHI)`` where
``mix`` is the standard SplitMix64 finalizer and PHI the 64-bit golden
ratio constant.  Normal variates come from the Box-Muller transform on
consecutive uniform pairs.
"""

from __future__ import annotations

import numpy as np

_PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U53 = float(2**53)


def _mix(x: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer on uint64 arrays (wraps modulo 2**64)."""
    with np.errstate(over="ignore"):
        x = x + _PHI
        x = (x ^ (x >> np.uint64(30))) * _M1
        x = (x ^ (x >> np.uint64(27))) * _M2
        return x ^ (x >> np.uint64(31))


class CounterRng:
    """Deterministic stream of uniforms/normals addressed by (seed, stream).

    Instances keep only an integer counter; the same (seed, stream) always
    yields the same sequence regardless of how draws are chunked.
    """

    def __init__(self, seed: int, stream: int = 0):
        with np.errstate(over="ignore"):
            self._base = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF)) ^ _mix(
                np.uint64(stream & 0xFFFFFFFFFFFFFFFF) * _PHI
            )
        self.seed = int(seed)
        self.stream = int(stream)
        self._counter = 0

    def spawn(self, stream: int) -> "CounterRng":
        """Independent substream; draws never collide with the parent."""
        return CounterRng(self.seed, (self.stream * 0x10001 + stream + 1) & 0xFFFFFFFFFFFFFFFF)

    def _raw(self, n: int) -> np.ndarray:
        idx = np.arange(self._counter, self._counter + n, dtype=np.uint64)
        self._counter += n
        with np.errstate(over="ignore"):
            return _mix(self._base + idx * _PHI)

    def uniforms(self, n: int) -> np.ndarray:
        """n uniforms in the half-open interval [0, 1)."""
        return (self._raw(n) >> np.uint64(11)).astype(np.float64) / _U53

    def uniforms_open(self, n: int) -> np.ndarray:
        """n uniforms in (0, 1]; safe as a log() argument."""
        return ((self._raw(n) >> np.uint64(11)).astype(np.float64) + 1.0) / _U53

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller."""
        half = (n + 1) // 2
        u1 = self.uniforms_open(half)
        u2 = self.uniforms(half)
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.concatenate([r * np.cos(theta), r * np.sin(theta)])
        return out[:n]

    def uniform_box(self, n: int, xmin: float, xmax: float, ymin: float, ymax: float) -> np.ndarray:
        """n points uniform over an axis-aligned box, shape (n, 2)."""
        u = self.uniforms(2 * n)
        pts = np.empty((n, 2))
        pts[:, 0] = xmin + (xmax - xmin) * u[:n]
        pts[:, 1] = ymin + (ymax - ymin) * u[n:]
        return pts
