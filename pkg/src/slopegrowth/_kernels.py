"""Compiled DFS that tallies the (d1, d2) displacement histogram.

Signed letters are encoded ``2 * index + (0 if sign > 0 else 1)`` so the
inverse of code ``c`` is ``c ^ 1``.
"""
from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True)
def _apply(stack, top, img, ilen, j):
    c = 0
    n = ilen[j]
    while c < n and top > 0 and stack[top - 1] == (img[j, c] ^ 1):
        top -= 1
        c += 1
    for q in range(c, n):
        stack[top] = img[j, q]
        top += 1
    return top, c


@numba.njit(cache=True)
def _undo(stack, top, img, ilen, j, c):
    top -= ilen[j] - c
    for q in range(c - 1, -1, -1):
        stack[top] = img[j, q] ^ 1
        top += 1
    return top


@numba.njit(cache=True)
def _shard(first, L, n_letters, img1, len1, img2, len2, hist):
    cap1 = L * max(1, img1.shape[1]) + 1
    cap2 = L * max(1, img2.shape[1]) + 1
    s1 = np.zeros(cap1, np.int64)
    s2 = np.zeros(cap2, np.int64)
    word = np.zeros(L + 1, np.int64)
    nxt = np.zeros(L + 2, np.int64)
    c1 = np.zeros(L + 1, np.int64)
    c2 = np.zeros(L + 1, np.int64)

    t1, c1[0] = _apply(s1, 0, img1, len1, first)
    t2, c2[0] = _apply(s2, 0, img2, len2, first)
    word[0] = first
    hist[t1, t2] += 1
    depth = 1
    nxt[depth] = 0
    while True:
        if depth < L and nxt[depth] < n_letters:
            j = nxt[depth]
            nxt[depth] += 1
            if j == (word[depth - 1] ^ 1):
                continue
            t1, c1[depth] = _apply(s1, t1, img1, len1, j)
            t2, c2[depth] = _apply(s2, t2, img2, len2, j)
            word[depth] = j
            hist[t1, t2] += 1
            depth += 1
            nxt[depth] = 0
        else:
            depth -= 1
            if depth == 0:
                break
            j = word[depth]
            t1 = _undo(s1, t1, img1, len1, j, c1[depth])
            t2 = _undo(s2, t2, img2, len2, j, c2[depth])


@numba.njit(cache=True)
def _all_shards(shards, L, n_letters, img1, len1, img2, len2, hist):
    for k in range(shards.shape[0]):
        _shard(shards[k], L, n_letters, img1, len1, img2, len2, hist[k])


def encode_images(letters_per_code: list[tuple[tuple[int, int], ...]]):
    width = max([len(x) for x in letters_per_code] + [1])
    img = np.zeros((len(letters_per_code), width), np.int64)
    ilen = np.zeros(len(letters_per_code), np.int64)
    for j, word in enumerate(letters_per_code):
        ilen[j] = len(word)
        for q, (i, s) in enumerate(word):
            img[j, q] = 2 * i + (0 if s > 0 else 1)
    return img, ilen


def displacement_histogram(img1, len1, img2, len2, L: int, shards=None) -> np.ndarray:
    """Histogram ``h[d1, d2]`` over all reduced abstract words of length 1..L.

    ``shards`` restricts the walk to words starting with the given letter
    codes; each shard has a private accumulator, summed at the end.
    """
    n_letters = img1.shape[0]
    if shards is None:
        shards = np.arange(n_letters, dtype=np.int64)
    shards = np.asarray(shards, dtype=np.int64)
    d1max = L * max(1, img1.shape[1])
    d2max = L * max(1, img2.shape[1])
    hist = np.zeros((len(shards), d1max + 1, d2max + 1), np.int64)
    if L >= 1 and len(shards):
        _all_shards(shards, L, n_letters, img1, len1, img2, len2, hist)
    return hist.sum(axis=0)
