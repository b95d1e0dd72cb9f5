"""Monte Carlo oracle for both hops.

Sampling works from first principles (order statistics of exponentials,
mixture turbulence, misalignment power transform) so estimates are fully
independent of the analytic machinery.  Streams are counter-based: chunk i of
a run is generated by Philox keyed with (seed, i), so results depend only on
(seed, n_samples, chunk_size) and never on how chunks are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

from .channels import EggParams, PointingParams
from .system import SystemConfig, OutageQuery

__all__ = [
    "McConfig",
    "McEstimate",
    "chunk_stream",
    "sample_rf_best_snr",
    "sample_egg_irradiance",
    "sample_pointing",
    "sample_uowc_snr",
    "mc_outage",
    "mc_moment",
]

# below this gamma shape the variate is built in log space to dodge underflow
_SMALL_SHAPE = 0.1


@dataclass(frozen=True)
class McConfig:
    """Sampling budget and stream identity."""

    n_samples: int
    seed: int = 20240717
    chunk_size: int = 1 << 20

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if not (0 <= int(self.seed) < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")

    def chunks(self):
        full, rem = divmod(self.n_samples, self.chunk_size)
        sizes = [self.chunk_size] * full
        if rem:
            sizes.append(rem)
        return sizes


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_err: float
    n: int


def chunk_stream(seed: int, chunk_index: int) -> Generator:
    """Independent deterministic substream for one chunk."""
    key = np.array([seed, chunk_index], dtype=np.uint64)
    return Generator(Philox(key=key))


def sample_rf_best_snr(stream: Generator, mu1: float, n_relays: int, size=None):
    """Best-of-N first-hop SNR: the max of N exponentials of mean mu1."""
    if mu1 <= 0 or n_relays < 1:
        raise ValueError("need mu1 > 0 and n_relays >= 1")
    n = int(n_relays)
    scalar = size is None
    shape = (1,) if scalar else ((size,) if isinstance(size, int) else size)
    best = stream.standard_exponential(size=shape)
    for _ in range(n - 1):
        np.maximum(best, stream.standard_exponential(size=shape), out=best)
    out = mu1 * best
    return float(out[0]) if scalar else out


def sample_egg_irradiance(stream: Generator, egg: EggParams, size=None):
    """Turbulence irradiance: exponential branch with probability w, else a
    power-transformed gamma variate (generalized gamma)."""
    shape = (size,) if isinstance(size, int) else size
    pick_exp = stream.random(size=shape) < egg.w
    exp_draw = egg.lam * stream.standard_exponential(size=shape)
    if egg.a >= _SMALL_SHAPE:
        gg_draw = egg.b * stream.standard_gamma(egg.a, size=shape) ** (1.0 / egg.c)
    else:
        # boost the shape by one and fold the U^(1/a) factor in log space;
        # a plain gamma draw underflows to zero for tiny shapes
        g1 = stream.standard_gamma(egg.a + 1.0, size=shape)
        u = stream.random(size=shape)
        ln_x = np.log(g1) + np.log1p(-u) / egg.a
        gg_draw = egg.b * np.exp(ln_x / egg.c)
    out = np.where(pick_exp, exp_draw, gg_draw)
    return float(out) if size is None else out


def sample_pointing(stream: Generator, pointing: PointingParams, size=None):
    """Misalignment factor a0 * U^(1/xi^2)."""
    u = stream.random(size=(size,) if isinstance(size, int) else size)
    out = pointing.a0 * np.exp(np.log1p(-u) / pointing.xi2)
    return float(out) if size is None else out


def sample_uowc_snr(stream: Generator, cfg: SystemConfig, size=None):
    """Optical-hop SNR samples rho * I matching the analytic density."""
    it = sample_egg_irradiance(stream, cfg.egg, size)
    ip = sample_pointing(stream, cfg.pointing, size)
    return cfg.budget.rho * it * ip


def mc_outage(cfg: SystemConfig, q: OutageQuery, mc: McConfig,
              floor_c: bool = False) -> McEstimate:
    """Empirical Pr[end-to-end SNR < gamma_th].

    floor_c draws the turbulence with the rounded generalized-gamma exponent
    (and the matching re-derived budget) so the estimate is comparable with
    the closed form.
    """
    sys_e = cfg.floored() if floor_c else cfg
    mu1 = sys_e.budget.mu1
    c_const = sys_e.budget.c_const
    n_relays = sys_e.rf.n_relays
    gth = q.gamma_th
    hits = 0
    for idx, size in enumerate(mc.chunks()):
        rng = chunk_stream(mc.seed, idx)
        g1 = sample_rf_best_snr(rng, mu1, n_relays, size)
        g2 = sample_uowc_snr(rng, sys_e, size)
        geq = g1 * (g2 / (g2 + c_const))
        hits += int(np.count_nonzero(geq < gth))
    n = mc.n_samples
    p = hits / n
    return McEstimate(mean=p, std_err=math.sqrt(p * (1.0 - p) / n), n=n)


def mc_moment(n: int, egg: EggParams, pointing: PointingParams,
              mc: McConfig) -> McEstimate:
    """Empirical n-th moment of the combined irradiance."""
    if n < 0 or n != int(n):
        raise ValueError("moment order must be a non-negative integer")
    if n == 0:
        return McEstimate(mean=1.0, std_err=0.0, n=mc.n_samples)
    order = int(n)
    sums = []
    sq_sums = []
    for idx, size in enumerate(mc.chunks()):
        rng = chunk_stream(mc.seed, idx)
        i = (sample_egg_irradiance(rng, egg, size)
             * sample_pointing(rng, pointing, size)) ** order
        # per-chunk numpy sums are deterministic; chunk subtotals are then
        # combined exactly, so results do not depend on scheduling
        sums.append(float(np.sum(i)))
        sq_sums.append(float(np.sum(i * i)))
    total = math.fsum(sums)
    total_sq = math.fsum(sq_sums)
    count = mc.n_samples
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return McEstimate(mean=mean, std_err=math.sqrt(var / count), n=count)
