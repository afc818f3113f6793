import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import dense_plain_inner, dense_sym, random_dense_sym
from levyfock.grid import GridFunction, GridMismatchError, hermite_mode, hermite_scale, l2_inner, make_grid
from levyfock.symtensor import (
    FockVector,
    RankMismatchError,
    SymTensor,
    fock_norm_sq,
    kappa_p_norm_sq,
    mode_norm_sq,
    plain_inner,
    sym_power,
    sym_product,
    symmetrize,
)


def test_symmetrize_two_permutation_average():
    g = make_grid(2, 1.0)
    t = symmetrize([[0, 1], [0, 0]], g)
    assert t[0, 1] == t[1, 0] == 0.5
    assert t[0, 0] == t[1, 1] == 0.0


def test_symmetrize_rank3_single_entry():
    g = make_grid(2, 1.0)
    arr = np.zeros((2, 2, 2))
    arr[0, 1, 1] = 3.0
    t = symmetrize(arr, g)
    for perm in set(itertools.permutations((0, 1, 1))):
        assert t[perm] == pytest.approx(1.0)
    assert t[0, 0, 1] == 0.0


def test_symmetrize_rejects_ragged():
    with pytest.raises(ValueError):
        symmetrize(np.zeros((2, 3)), make_grid(2, 1.0))


def test_symmetrize_matches_dense_oracle(rng):
    g = make_grid(3, 0.4)
    for n in range(5):
        arr = rng.standard_normal((3,) * n)
        t = symmetrize(arr, g)
        np.testing.assert_allclose(t.to_dense(), dense_sym(arr), atol=1e-14)
        # idempotent on symmetric input
        np.testing.assert_allclose(symmetrize(t.to_dense(), g).values, t.values, atol=1e-14)


def test_getitem_any_permutation():
    g = make_grid(4, 1.0)
    t = SymTensor.from_entries(g, 3, {(3, 0, 2): 7.0})
    for perm in itertools.permutations((0, 2, 3)):
        assert t[perm] == 7.0
    assert len(t.values) == math.comb(4 + 3 - 1, 3)
    with pytest.raises(IndexError):
        t[0, 1, 4]


def test_sym_product_rank1_square_is_outer():
    g = make_grid(3, 1.0)
    f = GridFunction(g, [1.0, -2.0, 0.5])
    np.testing.assert_allclose(sym_product(f, f).to_dense(), np.outer(f.values, f.values))


def test_sym_product_of_basis_vectors():
    g = make_grid(2, 1.0)
    t = sym_product(GridFunction(g, [1, 0]), GridFunction(g, [0, 1]))
    assert t[0, 1] == 0.5 and t[0, 0] == 0 and t[1, 1] == 0


def test_sym_product_unit_and_grid_check(rng):
    g = make_grid(3, 0.5)
    t = SymTensor(g, 2, rng.standard_normal(6))
    assert sym_product(SymTensor.scalar(g), t).allclose(t)
    with pytest.raises(GridMismatchError):
        sym_product(SymTensor.scalar(make_grid(3, 1.0)), t)


def test_sym_product_matches_dense_oracle(rng):
    g = make_grid(3, 1.0)
    for m, n in [(1, 1), (1, 2), (2, 2), (1, 3), (0, 2)]:
        a, b = random_dense_sym(rng, 3, m), random_dense_sym(rng, 3, n)
        s, t = symmetrize(a, g), symmetrize(b, g)
        np.testing.assert_allclose(sym_product(s, t).to_dense(), dense_sym(np.multiply.outer(a, b)), atol=1e-13)


def test_sym_product_commutative_associative(rng):
    g = make_grid(3, 1.0)
    f, k, x = (GridFunction(g, rng.standard_normal(3)) for _ in range(3))
    assert sym_product(f, k).allclose(sym_product(k, f))
    left = sym_product(sym_product(f, k), x)
    right = sym_product(f, sym_product(k, x))
    assert left.allclose(right, rtol=1e-12, atol=1e-12)


def test_plain_inner_rank1_is_l2(rng):
    g = make_grid(5, 0.3)
    f, k = GridFunction(g, rng.standard_normal(5)), GridFunction(g, rng.standard_normal(5))
    assert plain_inner(SymTensor.from_function(f), SymTensor.from_function(k)) == pytest.approx(l2_inner(f, k))


def test_plain_inner_hand_value():
    g = make_grid(2, 1.0)
    t = sym_product(GridFunction(g, [1, 0]), GridFunction(g, [0, 1]))
    assert plain_inner(t, t) == pytest.approx(0.5)


def test_plain_inner_rank0():
    g = make_grid(2, 1.0)
    assert plain_inner(SymTensor.scalar(g, 3.0), SymTensor.scalar(g, -2.0)) == -6.0


def test_plain_inner_rank_mismatch():
    g = make_grid(2, 1.0)
    with pytest.raises(RankMismatchError):
        plain_inner(SymTensor.zeros(g, 1), SymTensor.zeros(g, 2))


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_plain_inner_exhaustive_oracle(rng, d, n):
    h = 0.7
    g = make_grid(d, h)
    a, b = random_dense_sym(rng, d, n), random_dense_sym(rng, d, n)
    got = plain_inner(symmetrize(a, g), symmetrize(b, g))
    ref = dense_plain_inner(a, b, h)
    assert got == pytest.approx(ref, rel=1e-12, abs=1e-14)


def test_fock_norm_examples(rng):
    g = make_grid(3, 0.5)
    assert fock_norm_sq(FockVector.vacuum(g)) == 1.0
    f = GridFunction(g, rng.standard_normal(3))
    F = FockVector.from_tensors(g, [SymTensor.zeros(g, 0), SymTensor.from_function(f)])
    assert fock_norm_sq(F) == pytest.approx(l2_inner(f, f))
    one = make_grid(1, 1.0)
    assert fock_norm_sq(FockVector.from_tensors(one, [SymTensor.constant(one, 2)])) == 2.0


def test_fock_vector_rank_positions():
    g = make_grid(2, 1.0)
    with pytest.raises(RankMismatchError):
        FockVector(g, (SymTensor.zeros(g, 1),))
    F = FockVector.vacuum(g, 3)
    assert F.max_rank == 3 and F[3].rank == 3
    assert F.truncate(1).max_rank == 1


def _hermite_setup():
    g = make_grid(400, 0.04, -8.0)
    return g, hermite_scale(g, 6)


def test_kappa_p_norm_examples():
    g, scale = _hermite_setup()
    e0 = SymTensor.from_function(hermite_mode(0, g))
    F = FockVector.from_tensors(g, [SymTensor.zeros(g, 0), e0])
    assert kappa_p_norm_sq(F, 1.0, 0.0, scale) == pytest.approx(1.0, abs=1e-6)
    assert kappa_p_norm_sq(F, 0.0, 1.0, scale) == pytest.approx(4.0, abs=1e-6)
    for kappa, p in [(-1, 0), (0.5, 2), (1, -1)]:
        assert kappa_p_norm_sq(FockVector.vacuum(g), kappa, p, scale) == 1.0
    with pytest.raises(ValueError):
        kappa_p_norm_sq(F, 1.5, 0.0, scale)


def test_kappa_zero_p_zero_matches_fock_norm_in_mode_span():
    # a vector built from the sampled modes is inside the mode span, so the
    # mode-truncated norm equals the Fock norm up to the Gram defect
    g, scale = _hermite_setup()
    e0, e1 = (SymTensor.from_function(hermite_mode(j, g)) for j in (0, 1))
    F = FockVector(g, (SymTensor.scalar(g, 0.3), e0 * 2.0, sym_product(e0, e1)))
    assert kappa_p_norm_sq(F, 0.0, 0.0, scale) == pytest.approx(fock_norm_sq(F), rel=1e-6)


@pytest.mark.parametrize("d,n,modes", [(3, 1, 4), (3, 3, 5), (4, 4, 3), (2, 5, 6), (5, 2, 7)])
def test_mode_norm_matches_dense_transform(rng, d, n, modes):
    g = make_grid(d, 0.6, -1.0)
    scale = hermite_scale(g, modes)
    arr = random_dense_sym(rng, d, n)
    t = symmetrize(arr, g)
    p = -0.8
    m = scale.analysis_matrix()
    w = scale.weights(p)
    # brute force: all mode tuples, full coefficient sum
    total = 0.0
    for J in itertools.product(range(modes), repeat=n):
        c = arr
        for j in J:
            c = np.tensordot(m[j], c, axes=([0], [0]))
        total += math.prod(w[j] for j in J) * float(c) ** 2
    assert mode_norm_sq(t, p, scale) == pytest.approx(total, rel=1e-10)


small_d = st.integers(1, 3)


@settings(max_examples=40, deadline=None)
@given(small_d, st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_cauchy_schwarz(d, n, seed):
    r = np.random.default_rng(seed)
    g = make_grid(d, 0.5)
    s, t = (symmetrize(random_dense_sym(r, d, n), g) for _ in range(2))
    assert plain_inner(s, t) ** 2 <= plain_inner(s, s) * plain_inner(t, t) * (1 + 1e-12) + 1e-300


@settings(max_examples=40, deadline=None)
@given(small_d, st.integers(1, 3), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_sym_product_bilinear(d, m, n, seed):
    r = np.random.default_rng(seed)
    g = make_grid(d, 1.0)
    a, b = (symmetrize(random_dense_sym(r, d, m), g) for _ in range(2))
    c = symmetrize(random_dense_sym(r, d, n), g)
    x = float(r.normal())
    assert sym_product(a * x + b, c).allclose(sym_product(a, c) * x + sym_product(b, c), rtol=1e-12, atol=1e-12)


def test_sym_power_counts():
    g = make_grid(1, 1.0)
    f = GridFunction(g, [2.0])
    assert sym_power(f, 4).values[0] == 16.0
