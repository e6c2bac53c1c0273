"""Deterministic, order-independent randomness.

Every stochastic component of the lab (library sampling, task sampling,
rollout action draws) derives its randomness from an explicit
``(seed, stream, counter...)`` address instead of shared mutable RNG state,
so results never depend on evaluation order, chunking, or parallel fan-out.

Two mechanisms, both counter-based:

* keyed numpy ``Philox`` generators (`substream`) where the convenience of the
  ``numpy.random.Generator`` API is wanted, e.g. sampling representation
  parameters -- one independent key per (stream, index);
* a splitmix64 finalizer chain (`uniform_at`) for positional uniforms indexed
  by (task, rollout, step), which vectorizes over whole episode batches.
"""

from __future__ import annotations

import numpy as np

MASK64 = np.uint64(0xFFFFFFFFFFFFFFFF)

# Fixed stream ids; keep stable so file formats stay reproducible.
STREAM_LIBRARY = 1  # one substream per representation index
STREAM_TASKS = 2  # rollout task sampling
STREAM_VERIFY = 3  # verification-time spec subsampling
STREAM_LINE = 4  # 1d line rollouts
STREAM_SUBSET = 5  # stratified rollout-subset selection


def substream(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Independent generator for (seed, stream, index).

    The Philox key is the 128-bit word ``[seed, stream << 48 | index]``;
    distinct addresses give statistically independent streams.
    """
    if index < 0 or index >= 1 << 48:
        raise ValueError(f"substream index out of range: {index}")
    key = np.array(
        [np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64((stream << 48) | index)],
        dtype=np.uint64,
    )
    return np.random.Generator(np.random.Philox(key=key))


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer (Steele et al.); uint64 arithmetic wraps mod 2^64.
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def hash_words(seed: int, *words: np.ndarray | int) -> np.ndarray:
    """uint64 hash of (seed, word_0, word_1, ...), vectorized over the words."""
    with np.errstate(over="ignore"):
        h = _mix(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + np.uint64(0x9E3779B97F4A7C15))
        for w in words:
            arr = np.asarray(w, dtype=np.uint64)
            h = _mix(h ^ (arr + np.uint64(0x9E3779B97F4A7C15)))
    return h


def uniform_at(seed: int, *words: np.ndarray | int) -> np.ndarray:
    """Uniform [0, 1) doubles addressed by integer coordinates.

    53 high bits of the hash, so the result is exactly representable and
    identical on every platform.
    """
    h = hash_words(seed, *words)
    return (h >> np.uint64(11)).astype(np.float64) * (2.0**-53)
