"""Canonical multi-index bookkeeping for symmetric tensors.

A symmetric rank-n tensor over d cells is stored as one value per
nondecreasing multi-index i_1 <= ... <= i_n.  Multi-indices are ordered by
their colex rank: with c_k = i_k + k (strictly increasing), the position is
sum_k C(c_k, k+1), a bijection onto range(C(d+n-1, n)).
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np
import scipy.sparse as sp


def dimension(d: int, n: int) -> int:
    return math.comb(d + n - 1, n)


@lru_cache(maxsize=None)
def _binomials(top: int, width: int) -> np.ndarray:
    table = np.zeros((top + 1, width + 1), dtype=np.int64)
    for x in range(top + 1):
        for r in range(width + 1):
            table[x, r] = math.comb(x, r)
    return table


def locate(rows: np.ndarray, d: int) -> np.ndarray:
    """Canonical positions of the (possibly unsorted) multi-indices in ``rows``."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[-1]
    if n == 0:
        return np.zeros(rows.shape[:-1], dtype=np.int64)
    srt = np.sort(rows, axis=-1)
    shifted = srt + np.arange(n)
    table = _binomials(d + n, n)
    return table[shifted, np.arange(1, n + 1)].sum(axis=-1)


@lru_cache(maxsize=None)
def canonical(d: int, n: int) -> np.ndarray:
    """All nondecreasing multi-indices, shape (K, n), in canonical order."""
    combos = np.array(
        list(itertools.combinations_with_replacement(range(d), n)), dtype=np.int64
    ).reshape(dimension(d, n), n)
    order = np.argsort(locate(combos, d), kind="stable")
    out = combos[order]
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def multiplicity(d: int, n: int) -> np.ndarray:
    """Number of distinct permutations n!/prod(m_k!) of each canonical index."""
    idx = canonical(d, n)
    counts = np.zeros((idx.shape[0], d), dtype=np.int64)
    for k in range(n):
        np.add.at(counts, (np.arange(idx.shape[0]), idx[:, k]), 1)
    denom = np.array([math.prod(math.factorial(c) for c in row) for row in counts])
    out = math.factorial(n) / denom.astype(float)
    out.setflags(write=False)
    return out


def scatter(rows: np.ndarray, d: int, weights=None) -> sp.csr_matrix:
    """Sparse (K, len(rows)) matrix summing column j into the slot of rows[j]."""
    rows = np.asarray(rows, dtype=np.int64)
    n = rows.shape[-1]
    pos = locate(rows, d)
    data = np.ones(len(pos)) if weights is None else np.asarray(weights, dtype=float)
    return sp.csr_matrix(
        (data, (pos, np.arange(len(pos)))), shape=(dimension(d, n), len(pos))
    )


@lru_cache(maxsize=None)
def product_map(d: int, m: int, n: int) -> sp.csr_matrix:
    """Map from the flattened outer product of rank-m and rank-n canonical
    values to the canonical values of their symmetric product."""
    a = canonical(d, m)
    b = canonical(d, n)
    ka, kb = a.shape[0], b.shape[0]
    rows = np.concatenate(
        [np.repeat(a, kb, axis=0), np.tile(b, (ka, 1))], axis=1
    )
    w = np.outer(multiplicity(d, m), multiplicity(d, n)).reshape(-1)
    w = w / multiplicity(d, m + n)[locate(rows, d)]
    return scatter(rows, d, w)


@lru_cache(maxsize=None)
def append_positions(d: int, n: int) -> np.ndarray:
    """pos[J, j] = canonical position of J + (j,) for rank-n J."""
    base = canonical(d, n)
    k = base.shape[0]
    rows = np.concatenate(
        [np.repeat(base, d, axis=0), np.tile(np.arange(d), k)[:, None]], axis=1
    )
    out = locate(rows, d).reshape(k, d)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def repeat_positions(d: int, n: int, copies: int) -> np.ndarray:
    """pos[J, k] = canonical position of J with ``copies`` extra copies of J_k."""
    base = canonical(d, n)
    rows = np.concatenate(
        [np.repeat(base, n, axis=0), np.repeat(base.reshape(-1, 1), copies, axis=1)],
        axis=1,
    )
    out = locate(rows, d).reshape(base.shape[0], n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def repeat_map(d: int, n: int, copies: int) -> sp.csr_matrix:
    """Symmetrization of T(t_1..t_n) * [t_n = t_{n+1} = ... = t_{n+copies}].

    Returns the (K_{n+copies}, K_n) map acting on canonical values; any
    cell-delta factors are applied by the caller.
    """
    if n == 0:
        raise ValueError("cannot repeat an index of a rank-0 tensor")
    base = canonical(d, n)
    k = base.shape[0]
    pos = repeat_positions(d, n, copies).reshape(-1)
    src = np.repeat(np.arange(k), n)
    # each of the mult(J) arrangements of J puts J_k last mult(J)*count/n times
    w = np.repeat(multiplicity(d, n) / n, n) / multiplicity(d, n + copies)[pos]
    return sp.csr_matrix((w, (pos, src)), shape=(dimension(d, n + copies), k))


@lru_cache(maxsize=None)
def all_tuples(d: int, n: int) -> np.ndarray:
    out = np.array(list(itertools.product(range(d), repeat=n)), dtype=np.int64).reshape(d**n, n)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def dense_positions(d: int, n: int) -> np.ndarray:
    """Canonical position of every full tuple, in C order of a (d,)*n array."""
    out = locate(all_tuples(d, n), d)
    out.setflags(write=False)
    return out
