"""Pure-numpy implementations of the hot kernels.

These are the reference fallback for :mod:`qmodelid._ckernels` and must
produce the same values (up to floating-point summation order).
"""

from __future__ import annotations

import numpy as np


def sequence_count(n_maps: int, max_len: int) -> int:
    return sum(n_maps**length for length in range(max_len + 1))


def lex_permutation(n_maps: int, max_len: int) -> np.ndarray:
    """Map lexicographic sequence order to level-major (length, base-n index) order.

    ``perm[p]`` is the level-major position of the p-th sequence in
    lexicographic order.
    """
    offsets = [0]
    for length in range(max_len):
        offsets.append(offsets[-1] + n_maps**length)
    perm = np.empty(sequence_count(n_maps, max_len), dtype=np.int64)
    pos = 0
    # explicit stack: (length, base-n index), visited in preorder
    stack = [(0, 0)]
    while stack:
        length, idx = stack.pop()
        perm[pos] = offsets[length] + idx
        pos += 1
        if length < max_len:
            for j in range(n_maps - 1, -1, -1):
                stack.append((length + 1, idx * n_maps + j))
    return perm


def sequence_table(states, maps, effects, max_len: int) -> np.ndarray:
    """All values ``effects[k] . M_seq . states[i]`` in lexicographic (i, seq, k) order.

    ``states`` is (n_s, D), ``maps`` is (n_m, D, D) and ``effects`` is
    (n_e, D) holding the row vectors ``<<E_k|``. Returns a flat complex array.
    """
    states = np.ascontiguousarray(states, dtype=complex)
    maps = np.ascontiguousarray(maps, dtype=complex)
    effects = np.ascontiguousarray(effects, dtype=complex)
    n_s, dim = states.shape
    n_m = maps.shape[0]
    n_e = effects.shape[0]

    levels = []
    current = states[:, None, :]  # (n_s, n_m^L, D)
    for length in range(max_len + 1):
        levels.append(np.einsum("kb,sib->sik", effects, current))
        if length < max_len and n_m > 0:
            current = np.einsum("jab,sib->sija", maps, current).reshape(n_s, -1, dim)
        elif length < max_len:
            break
    level_major = np.concatenate(levels, axis=1)  # (n_s, S, n_e)
    perm = lex_permutation(n_m, max_len) if n_m > 0 else np.zeros(1, dtype=np.int64)
    return level_major[:, perm, :].reshape(-1)


def snd_scan(theta, angle_tol: float) -> bool:
    """True iff the eigenphases ``theta`` are super-non-degenerate.

    Checks that no ``(t_c - t_d) + (t_e - t_f)`` with c != d, e != f,
    c != f, d != e lies within ``angle_tol`` of any ``t_a - t_b`` on the circle.
    """
    t = np.asarray(theta, dtype=float)
    d = t.size
    diffs = (t[:, None] - t[None, :]).reshape(-1)  # all t_a - t_b, incl. 0
    idx = np.arange(d)
    c, dd, e, f = np.meshgrid(idx, idx, idx, idx, indexing="ij")
    mask = (c != dd) & (e != f) & (c != f) & (dd != e)
    sums = (t[c] - t[dd] + t[e] - t[f])[mask]
    two_pi = 2 * np.pi
    for start in range(0, sums.size, 4096):
        chunk = sums[start:start + 4096, None] - diffs[None, :]
        dist = np.abs(np.mod(chunk + np.pi, two_pi) - np.pi)
        if np.any(dist <= angle_tol):
            return False
    return True
