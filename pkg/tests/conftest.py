"""Brute-force dense oracles shared by the test modules.

These work on full (d,)*n numpy arrays and never touch the canonical index
machinery, so they are independent of the code under test.
"""
import itertools
import math

import numpy as np
import pytest


def dense_sym(arr):
    arr = np.asarray(arr, dtype=float)
    n = arr.ndim
    if n == 0:
        return arr
    perms = list(itertools.permutations(range(n)))
    return sum(np.transpose(arr, p) for p in perms) / len(perms)


def dense_create(phi, arr):
    return dense_sym(np.multiply.outer(np.asarray(phi, float), arr))


def dense_annihilate(phi, arr, h):
    n = arr.ndim
    return n * h * np.tensordot(np.asarray(phi, float), arr, axes=([0], [0]))


def dense_neutral(phi, arr):
    phi = np.asarray(phi, float)
    n = arr.ndim
    total = np.zeros(arr.shape)
    for k in range(n):
        shape = [1] * n
        shape[k] = -1
        total = total + phi.reshape(shape)
    return total * arr


def dense_double_annihilate(phi, arr):
    """n(n−1)·sym(φ(t₁) T(t₁, t₁, t₂, …))."""
    n = arr.ndim
    if n < 2:
        return np.zeros(arr.shape[1:]) if n else np.zeros(())
    d = arr.shape[0]
    diag = np.stack([arr[i, i] for i in range(d)])
    raw = np.asarray(phi, float).reshape((d,) + (1,) * (n - 2)) * diag
    return n * (n - 1) * dense_sym(raw)


def dense_plain_inner(a, b, h):
    return h ** np.ndim(a) * float(np.sum(np.asarray(a) * np.asarray(b)))


def random_dense_sym(rng, d, n):
    return dense_sym(rng.standard_normal((d,) * n))


def all_tuples(d, n):
    return itertools.product(range(d), repeat=n)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def factorial():
    return math.factorial


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict():
    """Record one pass/fail line per acceptance criterion."""

    def record(label, passed, detail):
        line = f"{label}: {'PASS' if passed else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
