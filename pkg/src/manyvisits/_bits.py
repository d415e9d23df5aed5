"""Bitmask subset encodings and lattice transforms shared by gpoly and lp.

A subset of a ground set of size k is a Python int in [0, 2**k).  Set
functions over all subsets are stored as arrays of length 2**k indexed by
mask.  The hot operation is the subset-sum transform: given per-element
weights w, produce sums(m) = sum of w[j] over bits j of m for every mask at
once.  numpy is used above a size threshold, plain loops below it (the numpy
call overhead dominates for tiny ground sets).
"""

from __future__ import annotations

import numpy as np

# Below this ground-set size the pure-Python paths win.
NUMPY_MIN_BITS = 10

# int64 headroom guard: intermediate sums must stay clearly inside the type.
_INT64_SAFE = 1 << 61


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def bits_of(mask: int) -> list[int]:
    """Indices of the set bits of mask, ascending."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def subset_sums_py(weights) -> list:
    """Subset-sum transform with Python ints (exact, any magnitude)."""
    k = len(weights)
    sums = [0] * (1 << k)
    for j in range(k):
        w = weights[j]
        step = 1 << j
        for base in range(0, 1 << k, step << 1):
            for m in range(base, base + step):
                sums[m + step] = sums[m] + w
    return sums


def subset_sums_np(weights) -> np.ndarray:
    """Subset-sum transform as an int64 array, falling back to object dtype
    when the magnitudes could overflow."""
    k = len(weights)
    total = sum(abs(int(w)) for w in weights)
    dtype = np.int64 if total < _INT64_SAFE else object
    sums = np.zeros(1 << k, dtype=dtype)
    for j in range(k):
        step = 1 << j
        view = sums.reshape(-1, 2, step)
        view[:, 1, :] = view[:, 0, :] + (int(weights[j]) if dtype is object else weights[j])
    return sums


def subset_sums(weights):
    """Subset sums for all masks; list for small k, numpy array for large."""
    if len(weights) >= NUMPY_MIN_BITS:
        return subset_sums_np(weights)
    return subset_sums_py(weights)


def compress_masks(k: int, keep: list[int]) -> np.ndarray:
    """Map masks over the kept elements to masks over the original k elements.

    keep lists the original bit positions that survive, in order; the result
    maps new-mask -> old-mask and has length 2**len(keep).
    """
    out = np.zeros(1 << len(keep), dtype=np.int64)
    for j, pos in enumerate(keep):
        step = 1 << j
        view = out.reshape(-1, 2, step)
        view[:, 1, :] = view[:, 0, :] + (1 << pos)
    return out
