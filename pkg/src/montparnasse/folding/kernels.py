"""Numba kernels for the builtin folding model.

All kernels take a boolean pairability matrix (pairable[i, j] true when
i < j, j - i > min_hairpin and the bases can pair) so the chemistry stays
outside the jitted code. Tables index half-open regions [i, j] with the
convention that an empty region (j < i) contributes 0 pairs / weight 1.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, inline="always")
def _weight(q, a, b):
    if a > b:
        return 1.0
    return q[a, b]


@njit(cache=True)
def max_pairing_table(pairable, min_hairpin):
    """dp[i, j] = maximum number of pairs formable on region [i, j]."""
    n = pairable.shape[0]
    dp = np.zeros((n, n), dtype=np.int64)
    for span in range(min_hairpin + 1, n):
        for i in range(n - span):
            j = i + span
            best = dp[i + 1, j]
            for k in range(i + min_hairpin + 1, j + 1):
                if pairable[i, k]:
                    inner = dp[i + 1, k - 1]
                    right = dp[k + 1, j] if k + 1 <= j else 0
                    cand = 1 + inner + right
                    if cand > best:
                        best = cand
            dp[i, j] = best
    return dp


@njit(cache=True)
def mfe_partners(pairable, min_hairpin, dp):
    """Deterministic backtrace of one maximum-pairing structure.

    At each position the leftmost opening index is paired whenever some
    optimal structure pairs it, with the smallest compatible closing
    index. Returns partner indices, -1 for unpaired.
    """
    n = pairable.shape[0]
    partner = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return partner
    stack_i = np.empty(n + 2, dtype=np.int64)
    stack_j = np.empty(n + 2, dtype=np.int64)
    stack_i[0] = 0
    stack_j[0] = n - 1
    top = 1
    while top > 0:
        top -= 1
        i = stack_i[top]
        j = stack_j[top]
        while i < j and dp[i, j] > 0:
            paired = False
            for k in range(i + min_hairpin + 1, j + 1):
                if not pairable[i, k]:
                    continue
                inner = dp[i + 1, k - 1]
                right = dp[k + 1, j] if k + 1 <= j else 0
                if 1 + inner + right == dp[i, j]:
                    partner[i] = k
                    partner[k] = i
                    if k + 1 < j:
                        stack_i[top] = k + 1
                        stack_j[top] = j
                        top += 1
                    j = k - 1
                    i = i + 1
                    paired = True
                    break
            if not paired:
                i += 1
    return partner


@njit(cache=True)
def inside_partition(pairable, min_hairpin, w, invrho):
    """Boltzmann-weighted structure counts per region.

    q[i, j] = sum over structures of region [i, j] of
    w^pairs * invrho^(j - i + 1). With invrho = 1 this is the exact
    partition function of the region; invrho < 1 rescales long sequences
    away from float overflow (probability ratios are unaffected).
    """
    n = pairable.shape[0]
    q = np.ones((n, n), dtype=np.float64)
    wp = w * invrho * invrho
    for span in range(n):
        for i in range(n - span):
            j = i + span
            acc = _weight(q, i, j - 1) * invrho
            for k in range(i, j - min_hairpin):
                if pairable[k, j]:
                    acc += _weight(q, i, k - 1) * wp * _weight(q, k + 1, j - 1)
            q[i, j] = acc
    return q


@njit(cache=True)
def pair_probability_matrix(pairable, min_hairpin, w, invrho, q):
    """p[i, j] for i < j via outside values at valid pairs only.

    The outside weight of pair (i, j) splits into the exterior context
    and contexts where (i, j) sits directly below an enclosing pair
    (k, l). Summing the latter over l first gives r[k, j], reusable for
    every i between k and j, which keeps the whole pass O(n^3).
    """
    n = pairable.shape[0]
    qout = np.zeros((n, n), dtype=np.float64)
    r = np.zeros((n, n), dtype=np.float64)
    rdone = np.zeros((n, n), dtype=np.uint8)
    probs = np.zeros((n, n), dtype=np.float64)
    if n == 0:
        return probs
    z = q[0, n - 1]
    wp = w * invrho * invrho
    for span in range(n - 1, min_hairpin, -1):
        for i in range(n - span):
            j = i + span
            if not pairable[i, j]:
                continue
            acc = _weight(q, 0, i - 1) * _weight(q, j + 1, n - 1)
            enc = 0.0
            for k in range(i):
                if not rdone[k, j]:
                    rv = 0.0
                    for l in range(j + 1, n):
                        if pairable[k, l] and qout[k, l] > 0.0:
                            rv += qout[k, l] * _weight(q, j + 1, l - 1)
                    r[k, j] = rv
                    rdone[k, j] = 1
                enc += _weight(q, k + 1, i - 1) * r[k, j]
            acc += wp * enc
            qout[i, j] = acc
            probs[i, j] = acc * wp * _weight(q, i + 1, j - 1) / z
    return probs
