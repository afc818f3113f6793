"""Sampling centered white-noise increments and Monte Carlo checks.

Each cell of the grid receives the increment of a centered Lévy process
over time ``width`` with Lévy measure s^{-2} ν(ds):

* Gaussian        N(0, h)
* Poisson(a)      a·(Poisson(h/a²) − h/a²)       (ν = δ_a)
* gamma  (λ=±2)   ±(Gamma(h, 1) − h)
* Pascal (|λ|>2)  compound Poisson of c·Log(q) jumps at rate −ln(1−q), centered
* Meixner (|λ|<2) jumps with |s| > ε by inverse-CDF lookup, the rest replaced
                  by a Gaussian of variance ν([−ε, ε]), centered

Random numbers come from Philox streams keyed by (seed, block) where a
block is a fixed run of ``BLOCK_PATHS`` consecutive paths, so a sample is
reproducible bit for bit whatever the path count or schedule.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .extfock import ext_inner
from .grid import GridFunction, GridModel, check_same_grid, l2_inner
from .ladder import NoiseFamily
from .orthopoly import MeixnerClassMeasure, make_measure, meixner_density, meixner_window
from .symtensor import SymTensor, plain_inner
from .wickpow import pair_batch, wick_values

BLOCK_PATHS = 8192
DEFAULT_EPS = 1e-3
TABLE_NODES = 10_000  # per sign, 2·10⁴ in total
PASCAL_TERMS = 400


class UnsupportedFamilyError(ValueError):
    pass


def _streams(seed: int, paths: int):
    for block, start in enumerate(range(0, paths, BLOCK_PATHS)):
        ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(block,))
        yield start, min(start + BLOCK_PATHS, paths), np.random.Generator(np.random.Philox(ss))


# --- Meixner jump table -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JumpTable:
    """Jumps of size |s| > eps under s^{-2}ν_λ(ds), tabulated on log-spaced nodes.

    Between nodes the inverse CDF is linear, i.e. the sampled jump law is
    piecewise uniform; ``mean_jump`` and ``second_moment`` are exact for
    that law so the centering matches what is actually drawn.
    """

    lam: float
    eps: float
    rate: float = field(init=False)
    p_positive: float = field(init=False)
    mean_jump: float = field(init=False)
    second_moment: float = field(init=False)
    small_variance: float = field(init=False)
    _table: tuple = field(init=False, repr=False)

    def __post_init__(self):
        lam, eps = self.lam, self.eps
        lo, hi = meixner_window(lam)
        sides = []
        for sign, edge in ((1.0, hi), (-1.0, -lo)):
            u = np.linspace(np.log(eps), np.log(edge), TABLE_NODES)
            s = sign * np.exp(u)
            # ∫ ν(s)/s² ds = ∫ ν(s)/|s| du in the log variable
            integrand = meixner_density(lam, s) / np.abs(s)
            cdf = np.concatenate([[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(u))])
            sides.append((s, cdf))
        (sp, cp), (sn, cn) = sides
        rate = cp[-1] + cn[-1]
        moments = []
        for s, cdf in sides:
            dF = np.diff(cdf)
            a, b = s[:-1], s[1:]
            moments.append((np.sum(dF * (a + b) / 2), np.sum(dF * (a * a + a * b + b * b) / 3)))
        m1 = (moments[0][0] + moments[1][0]) / rate
        m2 = (moments[0][1] + moments[1][1]) / rate
        k = 400
        step = 2 * eps / k
        mid = -eps + step * (np.arange(k) + 0.5)
        object.__setattr__(self, "rate", float(rate))
        object.__setattr__(self, "p_positive", float(cp[-1] / rate))
        object.__setattr__(self, "mean_jump", float(m1))
        object.__setattr__(self, "second_moment", float(m2))
        object.__setattr__(self, "small_variance", float(np.sum(meixner_density(lam, mid)) * step))
        # one ascending table: negative jumps (from the far end in), then positive
        cdf = np.concatenate([(cn[-1] - cn[::-1]), cn[-1] + cp]) / rate
        nodes = np.concatenate([sn[::-1], sp])
        object.__setattr__(self, "_table", (cdf, nodes))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cdf, nodes = self._table
        return np.interp(rng.random(count), cdf, nodes)


@lru_cache(maxsize=16)
def jump_table(lam: float, eps: float) -> JumpTable:
    return JumpTable(float(lam), float(eps))


# --- samplers -----------------------------------------------------------------------

def _compound(rng, counts: np.ndarray, draw) -> np.ndarray:
    """Sum ``counts[p, i]`` independent draws into each (path, cell)."""
    flat = counts.reshape(-1)
    total = int(flat.sum())
    jumps = draw(total)
    owner = np.repeat(np.arange(flat.size), flat)
    return np.bincount(owner, weights=jumps, minlength=flat.size).reshape(counts.shape)


def _sample_block(family: NoiseFamily, h: float, shape, rng, eps: float) -> np.ndarray:
    if family.kind == "gaussian":
        return math.sqrt(h) * rng.standard_normal(shape)
    if family.kind == "poisson":
        a = family.lam
        mu = h / (a * a)
        return a * (rng.poisson(mu, shape) - mu)
    lam = family.lam
    sign = 1.0 if lam >= 0 else -1.0
    kind = family.marginal
    if kind == "gamma":
        x = rng.gamma(h, 1.0, shape) - h
    elif kind == "pascal":
        c, q = MeixnerClassMeasure.pascal_parameters(lam)
        counts = rng.poisson(h * -math.log1p(-q), shape)
        x = c * _compound(rng, counts, lambda n: rng.logseries(q, n)) - c * q / (1 - q) * h
    else:
        table = jump_table(abs(lam), eps)
        counts = rng.poisson(h * table.rate, shape)
        big = _compound(rng, counts, lambda n: table.sample(rng, n))
        x = big - h * table.rate * table.mean_jump
        x += math.sqrt(h * table.small_variance) * rng.standard_normal(shape)
    return sign * x


@dataclass(frozen=True, eq=False)
class PathSample:
    family: NoiseFamily
    grid: GridModel
    paths: int
    seed: int
    increments: np.ndarray
    sampler_meta: dict = field(default_factory=dict)

    @property
    def omega(self) -> np.ndarray:
        """Cell values of the white-noise path, increments / h."""
        return self.increments / self.grid.width

    def pair(self, phi: GridFunction) -> np.ndarray:
        """⟨ω, φ⟩ per path."""
        check_same_grid(self.grid, phi.grid)
        return self.increments @ phi.values


def sample_increments(family: NoiseFamily, grid: GridModel, paths: int, seed: int, eps: float = DEFAULT_EPS) -> PathSample:
    if paths < 1:
        raise ValueError("paths must be positive")
    if not isinstance(family, NoiseFamily):
        raise UnsupportedFamilyError(f"not a noise family: {family!r}")
    out = np.empty((paths, grid.cells))
    for start, stop, rng in _streams(seed, paths):
        out[start:stop] = _sample_block(family, grid.width, (stop - start, grid.cells), rng, eps)
    meta = {"block_paths": BLOCK_PATHS, "generator": "philox4x64"}
    if family.marginal == "meixner":
        t = jump_table(abs(family.lam), eps)
        meta.update(eps=eps, jump_rate=t.rate, small_jump_variance=t.small_variance, table_nodes=2 * TABLE_NODES)
    out.setflags(write=False)
    return PathSample(family, grid, paths, int(seed), out, meta)


def path_from_increments(sample: PathSample) -> np.ndarray:
    return np.cumsum(sample.increments, axis=1)


# --- characteristic functionals ----------------------------------------------------

def _jump_kernel(x: np.ndarray) -> np.ndarray:
    """(e^{ix} − 1 − ix)/x², with its Taylor series near 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-3
    xs = np.where(small, 1.0, x)
    exact = (np.cos(xs) - 1.0 + 1j * (np.sin(xs) - xs)) / (xs * xs)
    series = -0.5 - 1j * x / 6 + x * x / 24
    return np.where(small, series, exact)


def levy_exponent(family: NoiseFamily, v) -> np.ndarray:
    """ψ(v) = ∫ (e^{ivs} − 1 − ivs) s^{-2} ν(ds), vectorized in v."""
    v = np.asarray(v, dtype=float)
    if family.kind == "gaussian":
        return -0.5 * v * v + 0j
    if family.kind == "poisson":
        a = family.lam
        return v * v * _jump_kernel(a * v)
    lam = family.lam
    w = v * (1.0 if lam >= 0 else -1.0)
    kind = family.marginal
    if kind == "gamma":
        return -np.log(1.0 - 1j * w) - 1j * w
    if kind == "pascal":
        c, q = MeixnerClassMeasure.pascal_parameters(lam)
        k = np.arange(1, PASCAL_TERMS + 1)
        terms = (q**k / k) * (np.exp(1j * np.multiply.outer(w, c * k)) - 1.0 - 1j * np.multiply.outer(w, c * k))
        return terms.sum(axis=-1)
    m = make_measure(abs(lam))
    kern = _jump_kernel(np.multiply.outer(w, m.nodes))
    return w * w * (kern @ m.weights)


def charfn_theory(family: NoiseFamily, phi: GridFunction, u: float) -> complex:
    """E exp(iu⟨ω, φ⟩) = exp(Σ_cells h ψ(u φ_cell))."""
    h = phi.grid.width
    return complex(np.exp(h * np.sum(levy_exponent(family, u * phi.values))))


@dataclass(frozen=True)
class EstimatorResult:
    mean: complex | float
    std_error: float
    samples: int

    def within(self, target, sigmas: float = 3.0) -> bool:
        return abs(self.mean - target) <= sigmas * self.std_error


def _estimate(values: np.ndarray) -> EstimatorResult:
    n = values.shape[0]
    if np.iscomplexobj(values):
        var = np.var(values.real, ddof=1) + np.var(values.imag, ddof=1)
        mean = complex(values.mean())
    else:
        var = np.var(values, ddof=1)
        mean = float(values.mean())
    return EstimatorResult(mean, float(math.sqrt(var / n)), n)


def charfn_empirical(sample: PathSample, phi: GridFunction, u: float) -> EstimatorResult:
    return _estimate(np.exp(1j * u * sample.pair(phi)))


# --- cumulants -----------------------------------------------------------------------------

def cumulant_theory(family: NoiseFamily, phi: GridFunction, k: int) -> float:
    """κ₂ = ∫φ², κ₃ = λ_eff ∫φ³."""
    if k == 2:
        return l2_inner(phi, phi)
    if k == 3:
        return family.lam_eff * phi.grid.width * float(np.sum(phi.values**3))
    raise ValueError(f"cumulant order must be 2 or 3, got {k}")


def estimate_cumulant(x: np.ndarray, k: int) -> EstimatorResult:
    """Sample cumulant of order 2 or 3 with a delta-method standard error."""
    n = x.shape[0]
    c = x - x.mean()
    m2 = np.mean(c * c)
    if k == 2:
        influence = c * c - m2
        est = m2 * n / (n - 1)
    elif k == 3:
        m3 = np.mean(c**3)
        influence = c**3 - m3 - 3.0 * m2 * c
        est = m3 * n * n / ((n - 1) * (n - 2))
    else:
        raise ValueError(f"cumulant order must be 2 or 3, got {k}")
    return EstimatorResult(float(est), float(np.std(influence, ddof=1) / math.sqrt(n)), n)


def mc_cumulant(family: NoiseFamily, phi: GridFunction, k: int, paths: int, seed: int, eps: float = DEFAULT_EPS) -> EstimatorResult:
    if k not in (2, 3):
        raise ValueError(f"cumulant order must be 2 or 3, got {k}")
    sample = sample_increments(family, phi.grid, paths, seed, eps)
    return estimate_cumulant(sample.pair(phi), k)


# --- chaos pairings ---------------------------------------------------------------------------

def chaos_prediction(family: NoiseFamily, f: SymTensor, g: SymTensor) -> float:
    """E[⟨:ω^{⊗m}:, f⟩⟨:ω^{⊗n}:, g⟩] = δ_mn n! (f, g)_n in the family's pairing."""
    if f.rank != g.rank:
        return 0.0
    inner = ext_inner(f, g) if family.extended else plain_inner(f, g)
    return math.factorial(f.rank) * inner


def mc_pairing(family: NoiseFamily, f: SymTensor, g: SymTensor, paths: int, seed: int,
               eps: float = DEFAULT_EPS, chunk: int = 1 << 16) -> EstimatorResult:
    check_same_grid(f.grid, g.grid)
    sample = sample_increments(family, f.grid, paths, seed, eps)
    lam, rho = family.coefficients
    top = max(f.rank, g.rank)
    omega = sample.omega
    prods = np.empty(paths)
    for start in range(0, paths, chunk):
        vals = wick_values(lam, rho, omega[start:start + chunk], f.grid.width, top)
        prods[start:start + chunk] = pair_batch(vals[f.rank], f) * pair_batch(vals[g.rank], g)
    return _estimate(prods)
