"""Counter-based uniforms.

A uniform is a pure function of ``(seed, stream, *counters)``: the words are
folded through the SplitMix64 finalizer, so the value drawn for node ``i`` or
pair ``(i, j)`` does not depend on how many other draws happened before it or
in which order pairs are visited.  Not cryptographic; statistically it is the
same mixer numpy uses to seed its own generators.
"""

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_MASK64 = (1 << 64) - 1

# stream ids
STREAM_WEIGHT = 1
STREAM_POSITION = 2  # + coordinate index
STREAM_EDGE = 101
STREAM_BOOT = 202


def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _u64(x):
    if isinstance(x, (int, np.integer)):
        return np.array([int(x) & _MASK64], dtype=np.uint64)
    arr = np.asarray(x)
    if arr.dtype == np.uint64:
        return np.atleast_1d(arr)
    return np.atleast_1d(arr.astype(np.int64)).view(np.uint64)


def hash_words(seed, stream, *counters):
    """64-bit hash of the key; broadcasts over array counters."""
    h = _mix(_u64(seed) + _GOLDEN)
    h = _mix(h ^ _mix(_u64(stream) + _GOLDEN))
    for c in counters:
        h = _mix(h ^ _mix(_u64(c) + _GOLDEN))
    return h


def uniforms(seed, stream, *counters):
    """Uniforms on the open interval (0, 1) with 53 random bits."""
    h = hash_words(seed, stream, *counters)
    return ((h >> _S11).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)


def node_uniforms(seed, stream, n):
    return uniforms(seed, stream, np.arange(n, dtype=np.int64))


def pair_uniforms(seed, i, j):
    """Edge coins for pairs; symmetric in (i, j)."""
    i = np.asarray(i, dtype=np.int64)
    j = np.asarray(j, dtype=np.int64)
    return uniforms(seed, STREAM_EDGE, np.minimum(i, j), np.maximum(i, j))


def derive_seed(seed, *words):
    """Child seed for replicate / bootstrap streams."""
    return int(hash_words(seed, STREAM_BOOT, *[np.int64(w) for w in words])[0])
