"""Counter-based pseudorandom primitives (splitmix64).

Every random quantity in the package is a pure function of a 64-bit key and a
counter, so results never depend on evaluation order, worker count, or
scheduling.  The same mixing function is exposed both as plain-Python helpers
and inside the numba kernels.
"""

import numpy as np
from numba import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1
_INV53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """splitmix64 finalizer on a plain python int (mod 2^64)."""
    z &= _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def prf(key: int, counter: int) -> int:
    """Deterministic 64-bit value for (key, counter)."""
    return mix64((key + (counter + 1) * 0x9E3779B97F4A7C15) & _MASK)


@njit(cache=True, inline="always")
def _mix64(z):
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


@njit(cache=True, inline="always")
def _prf(key, counter):
    return _mix64(key + (counter + np.uint64(1)) * GOLDEN)


@njit(cache=True)
def fill_uniforms(key, n, out):
    """out[i] = uniform in [0,1) derived from (key, i)."""
    k = np.uint64(key)
    for i in range(n):
        out[i] = (_prf(k, np.uint64(i)) >> np.uint64(11)) * _INV53


@njit(cache=True)
def fill_bernoulli(key, n, p, out):
    """out[i] = True with probability p, from the same stream as fill_uniforms."""
    k = np.uint64(key)
    for i in range(n):
        out[i] = ((_prf(k, np.uint64(i)) >> np.uint64(11)) * _INV53) < p
