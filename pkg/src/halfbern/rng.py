"""Counter-based random numbers for reproducible, schedule-independent Monte Carlo.

Every uniform variate is a pure function of ``(stream_seed, walk_index, step,
slot)``, so a walk's trajectory does not depend on batch size, chunking, or
thread count.  The mixing function is the splitmix64 finalizer, applied as a
short xor-chain over the counter words:

    u = finalize( finalize( finalize( finalize(seed) ^ index ) ^ step ) ^ slot )

The walker asks for all slots of one step at once, which shares the first
three links of the chain across slots.
"""

from __future__ import annotations

import hashlib

import numpy as np

_U64 = np.uint64
_GOLDEN = _U64(0x9E3779B97F4A7C15)
_MIX1 = _U64(0xBF58476D1CE4E5B9)
_MIX2 = _U64(0x94D049BB133111EB)
_S30 = _U64(30)
_S27 = _U64(27)
_S31 = _U64(31)
_S11 = _U64(11)
_INV_2_53 = 1.0 / float(1 << 53)


def _splitmix64(z):
    """splitmix64 finalizer; ``z`` is a uint64 scalar or array (wraps mod 2^64)."""
    z = z + _GOLDEN
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


def _as_u64(value) -> np.uint64:
    if isinstance(value, str):
        digest = hashlib.blake2b(value.encode("utf-8"), digest_size=8).digest()
        return _U64(int.from_bytes(digest, "little"))
    return _U64(int(value) & 0xFFFFFFFFFFFFFFFF)


def derive_seed(base_seed, *tags) -> int:
    """Derive a child stream seed from ``base_seed`` and a tag tuple.

    Tags may be ints or short strings (hashed stably).  Distinct tag tuples
    give statistically independent streams.
    """
    with np.errstate(over="ignore"):
        h = _splitmix64(_as_u64(base_seed))
        for tag in tags:
            h = _splitmix64(h ^ _as_u64(tag))
    return int(h)


def step_uniforms(stream_seed, walk_index, step, n_slots: int):
    """Uniforms for all slots of one step, shape (n_slots, len(walk_index)).

    Element [s, i] equals counter_uniform(stream_seed, walk_index[i], step, s).
    """
    idx = np.asarray(walk_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _splitmix64(_as_u64(stream_seed))
        h = _splitmix64(h ^ idx)
        h = _splitmix64(h ^ _as_u64(step))
        out = np.empty((n_slots, idx.shape[0]))
        for slot in range(n_slots):
            z = _splitmix64(h ^ _as_u64(slot))
            out[slot] = (z >> _S11).astype(np.float64)
    out *= _INV_2_53
    return out


def counter_uniform(stream_seed, walk_index, step, slot):
    """Uniform float64 in [0, 1) addressed by (seed, walk, step, slot).

    ``walk_index`` may be a scalar or uint64-convertible array; the other
    arguments are scalars.  Vectorizes over ``walk_index``.
    """
    idx = np.asarray(walk_index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        h = _splitmix64(_as_u64(stream_seed))
        h = _splitmix64(h ^ idx)
        h = _splitmix64(h ^ _as_u64(step))
        h = _splitmix64(h ^ _as_u64(slot))
    return (h >> _S11).astype(np.float64) * _INV_2_53
