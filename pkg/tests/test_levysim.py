import cmath
import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import loggamma

from levyfock.grid import GridFunction, l2_inner, make_grid
from levyfock.ladder import NoiseFamily
from levyfock.levysim import (
    EstimatorResult,
    PathSample,
    UnsupportedFamilyError,
    charfn_empirical,
    charfn_theory,
    chaos_prediction,
    cumulant_theory,
    estimate_cumulant,
    jump_table,
    levy_exponent,
    mc_cumulant,
    mc_pairing,
    path_from_increments,
    sample_increments,
)
from levyfock.symtensor import SymTensor

FAMILIES = [
    NoiseFamily.gaussian(),
    NoiseFamily.poisson(1.0),
    NoiseFamily.meixner(2.0),
    NoiseFamily.meixner(3.0),
    NoiseFamily.meixner(1.0),
]
IDS = [str(f) for f in FAMILIES]


def pascal_exponent(lam, v):
    """Closed form of Σ_k q^k/k (e^{ivck} − 1 − ivck)."""
    c = math.sqrt(lam * lam - 4)
    q = (lam - c) / (lam + c)
    return -cmath.log(1 - q * cmath.exp(1j * v * c)) + math.log(1 - q) - 1j * v * c * q / (1 - q)


def meixner_exponent(lam, v):
    """Centered Meixner(a = c, b = 2θ, d = 1/2) process exponent at unit time."""
    c = math.sqrt(4 - lam * lam)
    theta = math.atan(lam / c)
    mean = c * 0.5 * math.tan(theta)
    return math.log(math.cos(theta)) - cmath.log(cmath.cosh((c * v - 2j * theta) / 2)) - 1j * v * mean


def quad_exponent(lam, v):
    """∫(e^{ivs} − 1 − ivs) s^{-2} ν(ds) with scipy's adaptive quadrature."""
    c = math.sqrt(4 - lam * lam)

    def dens(s):
        a = s / c
        return c / (2 * math.pi) * math.exp(2 * loggamma(1 + 1j * a).real + 2 * a * math.atan(lam / c))

    def kern(s, part):
        if abs(s) < 1e-6:
            z = -0.5 * v * v + (-1j * v**3 * s / 6)
        else:
            z = (cmath.exp(1j * v * s) - 1 - 1j * v * s) / (s * s)
        return (z.real if part == 0 else z.imag) * dens(s)

    re = integrate.quad(kern, -np.inf, np.inf, args=(0,), limit=400)[0]
    im = integrate.quad(kern, -np.inf, np.inf, args=(1,), limit=400)[0]
    return complex(re, im)


# --- theory ------------------------------------------------------------------------------------

def test_charfn_gaussian_closed_form(rng):
    g = make_grid(5, 0.2)
    phi = GridFunction(g, rng.standard_normal(5))
    for u in (0.0, 0.5, 1.7):
        assert charfn_theory(NoiseFamily.gaussian(), phi, u) == pytest.approx(math.exp(-u * u * l2_inner(phi, phi) / 2))


def test_charfn_poisson_at_pi():
    g = make_grid(1, 1.0)
    val = charfn_theory(NoiseFamily.poisson(1.0), GridFunction.constant(g), math.pi)
    assert val == pytest.approx(-math.exp(-2), abs=1e-12)
    assert abs(val) == pytest.approx(0.135335, abs=1e-6)


def test_charfn_gamma_unit():
    g = make_grid(1, 1.0)
    val = charfn_theory(NoiseFamily.meixner(2.0), GridFunction.constant(g), 1.0)
    assert val == pytest.approx((1 + 1j) * cmath.exp(-1j) / 2, abs=1e-12)
    assert abs(val) == pytest.approx(0.707107, abs=1e-6)


@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_charfn_unit_at_zero_and_bounded(fam, rng):
    g = make_grid(4, 0.25)
    phi = GridFunction(g, rng.standard_normal(4))
    assert charfn_theory(fam, phi, 0.0) == pytest.approx(1.0)
    for u in (0.3, 1.0, 4.0):
        assert abs(charfn_theory(fam, phi, u)) <= 1.0 + 1e-12


@pytest.mark.parametrize("lam", [2.5, 3.0, -3.0, 5.0])
def test_pascal_exponent_closed_form(lam):
    for v in (-1.3, 0.4, 1.0, 2.2):
        ref = pascal_exponent(abs(lam), v if lam > 0 else -v)
        assert complex(levy_exponent(NoiseFamily.meixner(lam), v)) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.8, 1.5, -1.2])
def test_meixner_exponent_closed_form(lam):
    for v in (0.25, 0.5, 1.0, 1.5):
        w = v if lam >= 0 else -v
        ref = meixner_exponent(abs(lam), w)
        assert complex(levy_exponent(NoiseFamily.meixner(lam), v)) == pytest.approx(ref, abs=1e-8)


def test_meixner_exponent_adaptive_quadrature():
    for v in (0.5, 1.0):
        ref = quad_exponent(1.0, v)
        assert complex(levy_exponent(NoiseFamily.meixner(1.0), v)) == pytest.approx(ref, abs=1e-7)


def test_cumulant_theory_values(rng):
    g = make_grid(4, 0.5)
    phi = GridFunction(g, rng.standard_normal(4))
    assert cumulant_theory(NoiseFamily.gaussian(), phi, 3) == 0.0
    assert cumulant_theory(NoiseFamily.meixner(3.0), phi, 3) == pytest.approx(3 * 0.5 * np.sum(phi.values**3))
    with pytest.raises(ValueError):
        cumulant_theory(NoiseFamily.gaussian(), phi, 4)


@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_cumulants_from_exponent_derivatives(fam):
    # ψ(v) = −κ₂v²/2 − iκ₃v³/6 + …, read off by central differences
    e = 2e-3
    psi = lambda v: complex(levy_exponent(fam, v))
    d2 = (psi(e) - 2 * psi(0.0) + psi(-e)) / e**2
    d3 = (psi(2 * e) - 2 * psi(e) + 2 * psi(-e) - psi(-2 * e)) / (2 * e**3)
    assert -d2.real == pytest.approx(1.0, abs=1e-3)
    assert (-d3.imag) == pytest.approx(fam.lam_eff, abs=1e-3)


# --- sampling ----------------------------------------------------------------------------------

@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_determinism(fam):
    g = make_grid(6, 0.1)
    a = sample_increments(fam, g, 300, seed=42)
    b = sample_increments(fam, g, 300, seed=42)
    c = sample_increments(fam, g, 300, seed=43)
    np.testing.assert_array_equal(a.increments, b.increments)
    assert not np.array_equal(a.increments, c.increments)
    assert a.increments.shape == (300, 6)


def test_unsupported_family():
    with pytest.raises(UnsupportedFamilyError):
        sample_increments("weibull", make_grid(2, 1.0), 10, 0)
    with pytest.raises(ValueError):
        sample_increments(NoiseFamily.gaussian(), make_grid(2, 1.0), 0, 0)


@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_cell_mean_and_variance(fam):
    h = 0.5
    g = make_grid(4, h)
    x = sample_increments(fam, g, 40_000, seed=2024).increments
    for i in range(4):
        col = x[:, i]
        se = col.std(ddof=1) / math.sqrt(len(col))
        assert abs(col.mean()) < 3 * se
        var = estimate_cumulant(col, 2)
        assert var.within(h, 3.0), (var, h)


def test_gamma_unit_cell_centered():
    g = make_grid(1, 1.0)
    x = sample_increments(NoiseFamily.meixner(2.0), g, 20_000, seed=3).increments[:, 0]
    assert x.min() > -1.0
    assert abs(x.mean()) < 3 * x.std() / math.sqrt(x.size)


def test_pascal_lattice_and_no_jump_probability():
    lam = 3.0
    c = math.sqrt(5)
    q = (3 - c) / (3 + c)
    g = make_grid(1, 1.0)
    x = sample_increments(NoiseFamily.meixner(lam), g, 50_000, seed=11).increments[:, 0]
    shifted = (x + c * q / (1 - q)) / c
    np.testing.assert_allclose(shifted, np.round(shifted), atol=1e-9)
    # no jump in unit time has probability exp(−rate) = 1 − q
    p0 = np.mean(np.round(shifted) == 0)
    se = math.sqrt((1 - q) * q / x.size)
    assert abs(p0 - (1 - q)) < 3 * se


def test_meixner_truncation_metadata():
    s = sample_increments(NoiseFamily.meixner(1.0), make_grid(2, 0.5), 10, 0)
    meta = s.sampler_meta
    assert meta["eps"] == 1e-3
    assert meta["small_jump_variance"] < 1e-3
    assert meta["table_nodes"] == 20_000


@pytest.mark.parametrize("lam", [0.0, 1.0, 1.9])
def test_jump_table_preserves_variance(lam):
    t = jump_table(lam, 1e-3)
    assert t.rate * t.second_moment + t.small_variance == pytest.approx(1.0, abs=1e-5)
    draws = t.sample(np.random.default_rng(0), 1000)
    assert np.all(np.abs(draws) >= 1e-3 * (1 - 1e-12))


def test_path_from_increments():
    g = make_grid(4, 0.25)
    zero = PathSample(NoiseFamily.gaussian(), g, 2, 0, np.zeros((2, 4)))
    assert not np.any(path_from_increments(zero))
    inc = np.zeros((1, 4))
    inc[0, 0] = 1.0
    step = PathSample(NoiseFamily.gaussian(), g, 1, 0, inc)
    np.testing.assert_array_equal(path_from_increments(step), [[1, 1, 1, 1]])


def test_gamma_endpoint_moments():
    g = make_grid(20, 0.05)
    s = sample_increments(NoiseFamily.meixner(2.0), g, 40_000, seed=5)
    end = path_from_increments(s)[:, -1]
    np.testing.assert_allclose(end, s.increments.sum(axis=1))
    assert abs(end.mean()) < 3 * end.std() / math.sqrt(end.size)
    assert estimate_cumulant(end, 2).within(1.0)


# --- estimators --------------------------------------------------------------------------------

def test_estimator_standard_error_scaling():
    r = np.random.default_rng(1)
    x = r.exponential(size=400_000)
    small, large = estimate_cumulant(x[:100_000], 3), estimate_cumulant(x, 3)
    assert large.std_error == pytest.approx(small.std_error / 2, rel=0.1)
    assert large.within(2.0)  # κ₃ of Exp(1) is 2
    assert estimate_cumulant(x, 2).within(1.0)
    with pytest.raises(ValueError):
        estimate_cumulant(x, 4)


def test_estimator_within():
    est = EstimatorResult(1.0, 0.1, 100)
    assert est.within(1.29) and not est.within(1.31)


@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_mc_cumulants_small(fam):
    g = make_grid(10, 0.1)
    phi = GridFunction.constant(g)
    for k in (2, 3):
        est = mc_cumulant(fam, phi, k, 30_000, seed=100 + k)
        assert est.within(cumulant_theory(fam, phi, k)), (k, est)
    with pytest.raises(ValueError):
        mc_cumulant(fam, phi, 5, 10, 0)


@pytest.mark.parametrize("fam", [NoiseFamily.gaussian(), NoiseFamily.poisson(1.0), NoiseFamily.meixner(2.0)],
                         ids=str)
def test_charfn_empirical_small(fam, rng):
    g = make_grid(5, 0.2)
    phi = GridFunction(g, rng.standard_normal(5))
    s = sample_increments(fam, g, 20_000, seed=9)
    for u in (0.5, 1.0):
        est = charfn_empirical(s, phi, u)
        assert abs(est.mean - charfn_theory(fam, phi, u)) < 5 / math.sqrt(20_000)


@pytest.mark.parametrize("fam", FAMILIES, ids=IDS)
def test_mc_pairing_rank_one(fam, rng):
    g = make_grid(3, 0.5)
    f, k = SymTensor(g, 1, rng.standard_normal(3)), SymTensor(g, 1, rng.standard_normal(3))
    est = mc_pairing(fam, f, k, 30_000, seed=21)
    target = l2_inner(GridFunction(g, f.values), GridFunction(g, k.values))
    assert chaos_prediction(fam, f, k) == pytest.approx(target)
    assert est.within(target)


def test_mc_pairing_gamma_cross_rank_zero(rng):
    g = make_grid(2, 0.5)
    f, k = SymTensor(g, 1, rng.standard_normal(2)), SymTensor(g, 2, rng.standard_normal(3))
    assert chaos_prediction(NoiseFamily.meixner(2.0), f, k) == 0.0
    assert mc_pairing(NoiseFamily.meixner(2.0), f, k, 30_000, seed=4).within(0.0)


@pytest.mark.parametrize("fam", [NoiseFamily.meixner(1.0), NoiseFamily.meixner(3.0), NoiseFamily.poisson(0.5)],
                         ids=str)
def test_mc_pairing_rank_two(fam, rng):
    g = make_grid(2, 0.5)
    f, k = SymTensor(g, 2, rng.standard_normal(3)), SymTensor(g, 2, rng.standard_normal(3))
    est = mc_pairing(fam, f, k, 60_000, seed=8)
    assert est.within(chaos_prediction(fam, f, k)), (est, chaos_prediction(fam, f, k))
