"""Hot loops: edit distance over code points and greedy one-to-one alignment.

Each kernel has a numba ``@njit`` version and a pure-numpy version. The numba
path is used when numba imports and ``HREX_KERNELS`` is not ``numpy``.
Both paths are always importable so tests and the benchmark can compare them.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_AVAILABLE = False

BACKEND = "numba" if NUMBA_AVAILABLE and os.environ.get("HREX_KERNELS", "").lower() != "numpy" else "numpy"


def codepoints(text: str) -> np.ndarray:
    """Unicode scalar values of ``text`` as an int32 array."""
    return np.frombuffer(text.encode("utf-32-le"), dtype=np.uint32).astype(np.int32)


# --- edit distance ----------------------------------------------------------


def levenshtein_numpy(a: np.ndarray, b: np.ndarray) -> int:
    # Loop over the shorter sequence, vectorize over the longer one. The
    # insertion chain cur[j] = min(cur[j-1] + 1, tmp[j]) is a running
    # minimum of tmp[k] - k, shifted back by j.
    if len(a) > len(b):
        a, b = b, a
    m = len(b)
    if len(a) == 0:
        return m
    offsets = np.arange(m + 1, dtype=np.int64)
    prev = offsets.copy()
    tmp = np.empty(m + 1, dtype=np.int64)
    for i in range(1, len(a) + 1):
        tmp[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + (b != a[i - 1]), out=tmp[1:])
        prev = np.minimum.accumulate(tmp - offsets) + offsets
    return int(prev[m])


def greedy_align_numpy(sim: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n_rows, n_cols = sim.shape
    rows, cols = np.divmod(np.arange(n_rows * n_cols), n_cols)
    # Descending similarity, ties by lowest (row, col).
    order = np.lexsort((cols, rows, -sim.ravel()))
    used_r = np.zeros(n_rows, dtype=bool)
    used_c = np.zeros(n_cols, dtype=bool)
    out_r, out_c = [], []
    limit = min(n_rows, n_cols)
    for idx in order:
        r, c = rows[idx], cols[idx]
        if used_r[r] or used_c[c]:
            continue
        used_r[r] = used_c[c] = True
        out_r.append(r)
        out_c.append(c)
        if len(out_r) == limit:
            break
    return np.asarray(out_r, dtype=np.int64), np.asarray(out_c, dtype=np.int64)


if NUMBA_AVAILABLE:

    @njit(cache=True, nogil=True)
    def levenshtein_numba(a, b):
        if len(a) > len(b):
            a, b = b, a
        m = len(b)
        if len(a) == 0:
            return m
        prev = np.arange(m + 1)
        cur = np.empty(m + 1, dtype=prev.dtype)
        for i in range(1, len(a) + 1):
            cur[0] = i
            ai = a[i - 1]
            for j in range(1, m + 1):
                best = prev[j - 1] + (0 if b[j - 1] == ai else 1)
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                if cur[j - 1] + 1 < best:
                    best = cur[j - 1] + 1
                cur[j] = best
            prev, cur = cur, prev
        return prev[m]

    @njit(cache=True, nogil=True)
    def _greedy_sweep(order, n_rows, n_cols):
        used_r = np.zeros(n_rows, dtype=np.bool_)
        used_c = np.zeros(n_cols, dtype=np.bool_)
        limit = min(n_rows, n_cols)
        out_r = np.empty(limit, dtype=np.int64)
        out_c = np.empty(limit, dtype=np.int64)
        k = 0
        for t in range(order.shape[0]):
            if k == limit:
                break
            r = order[t] // n_cols
            c = order[t] % n_cols
            if used_r[r] or used_c[c]:
                continue
            used_r[r] = True
            used_c[c] = True
            out_r[k] = r
            out_c[k] = c
            k += 1
        return out_r[:k], out_c[:k]

    def greedy_align_numba(sim: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        n_rows, n_cols = sim.shape
        flat = np.arange(n_rows * n_cols, dtype=np.int64)
        # Flat index order equals (row, col) order, so it serves as the tie-break.
        order = np.lexsort((flat, -sim.ravel()))
        return _greedy_sweep(order, n_rows, n_cols)


if BACKEND == "numba":
    _levenshtein = levenshtein_numba
    _greedy = greedy_align_numba
else:
    _levenshtein = levenshtein_numpy
    _greedy = greedy_align_numpy


def edit_distance(a: np.ndarray, b: np.ndarray) -> int:
    return int(_levenshtein(a, b))


def greedy_align(sim: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Repeatedly take the globally largest unused cell of ``sim``.

    Returns matched (row, col) index arrays in pick order; length is
    ``min(sim.shape)``.
    """
    sim = np.ascontiguousarray(sim, dtype=np.float64)
    if sim.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    return _greedy(sim)
