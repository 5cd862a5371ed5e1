"""Exact samplers and Monte Carlo checks.

On a finite space the stochastic integral is a finite sum (SaS) or a finite
maximum (Frechet) of independent variables, so both samplers are exact.

Randomness comes from Philox keyed by the seed.  Samples are produced in
fixed blocks of ``BLOCK`` rows, block ``b`` using counter ``b``, so the
stream depends only on the seed: chunking and thread count never change it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import stats

from .core import scale_functional
from .errors import DimensionMismatch, EmptySample, ValidationError
from .maxstable import frechet_fdd_cdf, marginal_scale

BLOCK = 4096
_STREAM_SAS = 1
_STREAM_FRECHET = 2
CF_ENVELOPE_Z = 4.0


@dataclass(frozen=True)
class SimulationConfig:
    seed: int
    n_samples: int
    chunk_size: int = 65536
    workers: int = 1

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.n_samples < 0 or self.chunk_size < 1 or self.workers < 1:
            raise ValidationError("n_samples must be >= 0, chunk_size and workers >= 1")


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """``values[i, j]`` is realization ``i`` at ``times[j]``."""

    values: np.ndarray
    times: tuple[str, ...]
    rep_digest: str
    config: SimulationConfig
    kind: str

    def __len__(self):
        return len(self.values)

    def column(self, t: str) -> np.ndarray:
        return self.values[:, self.times.index(t)]


def _uniforms(seed: int, stream: int, lo: int, hi: int, width: int) -> np.ndarray:
    """Open-interval uniforms of shape ``(hi - lo, width)`` for rows ``lo:hi``."""
    out = []
    for b in range(lo // BLOCK, (hi - 1) // BLOCK + 1 if hi > lo else lo // BLOCK):
        gen = np.random.Generator(
            np.random.Philox(key=(stream << 64) | int(seed), counter=[0, 0, b, 0])
        )
        block = gen.random((BLOCK, width))
        start, stop = max(lo - b * BLOCK, 0), min(hi - b * BLOCK, BLOCK)
        out.append(block[start:stop])
    if not out:
        return np.zeros((0, width))
    # shift off zero: values lie on the 2**-53 grid
    return np.concatenate(out) + 2.0**-54


def standard_sas(alpha: float, u_angle: np.ndarray, u_exp: np.ndarray) -> np.ndarray:
    """Chambers-Mallows-Stuck transform for symmetric stable variables.

    Maps independent uniforms on (0, 1) to variables with characteristic
    function ``exp(-|theta|**alpha)``.  At ``alpha = 1`` this is ``tan(V)``.
    """
    v = np.pi * (u_angle - 0.5)
    w = -np.log(u_exp)
    if alpha == 1.0:
        return np.tan(v)
    return (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha)
    )


def _run_chunks(cfg: SimulationConfig, fn, width: int) -> np.ndarray:
    bounds = [
        (lo, min(lo + cfg.chunk_size, cfg.n_samples)) for lo in range(0, cfg.n_samples, cfg.chunk_size)
    ]
    if not bounds:
        return np.zeros((0, width))
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            parts = list(pool.map(lambda b: fn(*b), bounds))
    else:
        parts = [fn(lo, hi) for lo, hi in bounds]
    return np.concatenate(parts)


def sample_sas(rep, cfg: SimulationConfig) -> SampleMatrix:
    """Draw ``X_t = sum_s f_t(s) mu_s**(1/alpha) W_s`` with ``W_s`` standard SaS."""
    n_s = rep.n_points
    scale = rep.weights ** (1.0 / rep.alpha)

    def chunk(lo, hi):
        u = _uniforms(cfg.seed, _STREAM_SAS, lo, hi, 2 * n_s)
        w = standard_sas(rep.alpha, u[:, :n_s], u[:, n_s:])
        return (w * scale) @ rep.values.T

    values = _run_chunks(cfg, chunk, rep.n_times)
    return SampleMatrix(values, rep.times, rep.digest(), cfg, "sas")


def sample_frechet(rep, cfg: SimulationConfig) -> SampleMatrix:
    """Draw ``Y_t = max_s f_t(s) (mu_s / E_s)**(1/alpha)`` with ``E_s`` standard exponential."""
    n_s = rep.n_points
    scale = rep.weights ** (1.0 / rep.alpha)

    def chunk(lo, hi):
        u = _uniforms(cfg.seed, _STREAM_FRECHET, lo, hi, n_s)
        z = scale * (-np.log(u)) ** (-1.0 / rep.alpha)
        return (z[:, None, :] * rep.values[None, :, :]).max(axis=2)

    values = _run_chunks(cfg, chunk, rep.n_times)
    return SampleMatrix(values, rep.times, rep.digest(), cfg, "frechet")


def _as_array(samples) -> np.ndarray:
    values = samples.values if isinstance(samples, SampleMatrix) else np.asarray(samples, float)
    if values.ndim != 2:
        raise DimensionMismatch("samples must be a 2-d array")
    if len(values) == 0:
        raise EmptySample("no samples")
    return values


@dataclass
class CFReport:
    """Empirical vs exact characteristic function at each probe."""

    probes: np.ndarray
    empirical: np.ndarray
    expected: np.ndarray
    deviations: np.ndarray
    envelope: float
    flagged: np.ndarray
    passed: bool


def check_empirical_cf(samples, rep, probes, level: float = 0.01) -> CFReport:
    """Compare the empirical characteristic function with ``exp(-scale_functional)``.

    A probe is flagged when ``|ecf(a) - exp(-sigma(a))|`` exceeds ``4/sqrt(n)``.
    The check passes when at most ``floor(level * n_probes)`` probes are
    flagged.
    """
    x = _as_array(samples)
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    if x.shape[1] != rep.n_times or probes.shape[1] != rep.n_times:
        raise DimensionMismatch("samples, probes and representation disagree on |T|")
    n = len(x)
    acc = np.zeros(len(probes), dtype=complex)
    for lo in range(0, n, 8192):
        acc += np.exp(1j * (x[lo : lo + 8192] @ probes.T)).sum(axis=0)
    ecf = acc / n
    expected = np.exp(-scale_functional(rep, probes))
    dev = np.abs(ecf - expected)
    envelope = CF_ENVELOPE_Z / np.sqrt(n)
    flagged = dev > envelope
    return CFReport(
        probes, ecf, expected, dev, envelope, flagged,
        bool(flagged.sum() <= np.floor(level * len(probes))),
    )


@dataclass
class CDFReport:
    """Empirical vs exact joint CDF at probes, plus marginal KS tests."""

    probes: list
    empirical: np.ndarray
    expected: np.ndarray
    envelopes: np.ndarray
    flagged: np.ndarray
    ks_statistics: np.ndarray
    ks_pvalues: np.ndarray
    level: float
    passed: bool = field(default=False)


def frechet_marginal(rep, t: str):
    """Frozen scipy distribution of the marginal ``Y_t``."""
    sigma = marginal_scale(rep)[rep.times.index(t)] ** (1.0 / rep.alpha)
    return stats.invweibull(c=rep.alpha, scale=sigma)


def check_empirical_cdf(samples, rep, probes: Sequence[tuple[Sequence[str], Sequence[float]]], level: float = 0.01) -> CDFReport:
    """Check Frechet samples against the exact finite-dimensional CDF.

    Each probe ``(subset, y)`` compares the fraction of rows with
    ``Y_t <= y_t`` on the subset against :func:`frechet_fdd_cdf`, with
    envelope ``4 sqrt(p(1-p)/n) + 1/n``; at most ``floor(level * n_probes)``
    probes may fall outside.  Each marginal also gets a one-sample KS test
    against the exact Frechet law and must have p-value at least ``level``.
    """
    x = _as_array(samples)
    if x.shape[1] != rep.n_times:
        raise DimensionMismatch("samples and representation disagree on |T|")
    n = len(x)
    emp, exp_, env = [], [], []
    for subset, y in probes:
        rows = [rep.times.index(str(t)) for t in subset]
        emp.append(np.mean(np.all(x[:, rows] <= np.asarray(y, float), axis=1)))
        p = frechet_fdd_cdf(rep, subset, y)
        exp_.append(p)
        env.append(CF_ENVELOPE_Z * np.sqrt(p * (1 - p) / n) + 1.0 / n)
    emp, exp_, env = np.array(emp), np.array(exp_), np.array(env)
    flagged = np.abs(emp - exp_) > env
    ks = [stats.kstest(x[:, j], frechet_marginal(rep, t).cdf) for j, t in enumerate(rep.times)]
    ks_stat = np.array([k.statistic for k in ks])
    ks_p = np.array([k.pvalue for k in ks])
    passed = bool(flagged.sum() <= np.floor(level * len(probes)) and np.all(ks_p >= level))
    return CDFReport(list(probes), emp, exp_, env, flagged, ks_stat, ks_p, level, passed)


def ks_two_sample(a, b) -> tuple[np.ndarray, np.ndarray]:
    """Two-sample KS statistic and p-value per time column."""
    a, b = _as_array(a), _as_array(b)
    if a.shape[1] != b.shape[1]:
        raise DimensionMismatch("sample matrices have different numbers of times")
    res = [stats.ks_2samp(a[:, j], b[:, j]) for j in range(a.shape[1])]
    return np.array([r.statistic for r in res]), np.array([r.pvalue for r in res])


def random_cf_probes(rep, k: int, rng: np.random.Generator) -> np.ndarray:
    """``k`` random coefficient vectors with scale functional spread over [0.05, 2]."""
    z = rng.normal(size=(k, rep.n_times))
    target = rng.uniform(0.05, 2.0, size=k)
    sigma = scale_functional(rep, z)
    return z * ((target / sigma) ** (1.0 / rep.alpha))[:, None]


def random_cdf_probes(rep, k: int, rng: np.random.Generator) -> list:
    """``k`` random ``(subset, y)`` probes with marginal probabilities in [0.3, 0.95]."""
    sigma = marginal_scale(rep) ** (1.0 / rep.alpha)
    probes = []
    for _ in range(k):
        size = int(rng.integers(1, rep.n_times + 1))
        rows = np.sort(rng.choice(rep.n_times, size=size, replace=False))
        u = rng.uniform(0.3, 0.95, size=size)
        y = sigma[rows] * (-np.log(u)) ** (-1.0 / rep.alpha)
        probes.append(([rep.times[j] for j in rows], y))
    return probes
