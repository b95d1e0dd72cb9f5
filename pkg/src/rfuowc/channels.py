"""Per-hop channel models.

First hop: Rayleigh-faded RF downlink from a hovering UAV to N surface buoys
with best-relay selection, so the selected SNR is the maximum of N
exponentials.  Second hop: underwater optical link whose irradiance is the
product of a mixture exponential/generalized-gamma turbulence factor and a
beam-misalignment factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import EvalOptions, DEFAULT_OPTIONS, MeijerGSpec, meijer_g_batch, ln_gamma

__all__ = [
    "RfLinkParams",
    "EggParams",
    "PointingParams",
    "UowcLinkParams",
    "LinkBudget",
    "WaterPreset",
    "WATER_PRESETS",
    "get_preset",
    "rf_avg_power_gain",
    "rf_avg_snr",
    "rf_snr_pdf",
    "rf_snr_cdf",
    "relay_constant_c",
    "relay_gain_sq",
    "egg_moment",
    "uowc_budget",
    "uowc_snr_pdf",
    "uowc_snr_cdf",
    "GAIN_CONVENTIONS",
    "RHO_CONVENTIONS",
]

GAIN_CONVENTIONS = ("squared", "literal")
RHO_CONVENTIONS = ("as-written", "mu2")

MAX_RELAYS = 64


@dataclass(frozen=True)
class RfLinkParams:
    """RF hop budget: transmit power, noise power, reference gain, geometry."""

    p1: float
    sigma1_sq: float
    g0: float
    radius_r: float
    height_l: float
    n_relays: int

    def __post_init__(self):
        if self.p1 <= 0 or self.sigma1_sq <= 0 or self.g0 <= 0:
            raise ValueError("p1, sigma1_sq and g0 must be positive")
        if self.radius_r < 0 or self.height_l < 0:
            raise ValueError("geometry lengths must be non-negative")
        if self.radius_r == 0 and self.height_l == 0:
            raise ValueError("degenerate geometry: buoys and UAV coincide")
        if not (1 <= int(self.n_relays) <= MAX_RELAYS):
            raise ValueError(f"n_relays must be in 1..{MAX_RELAYS}")
        object.__setattr__(self, "n_relays", int(self.n_relays))


@dataclass(frozen=True)
class EggParams:
    """Turbulence mixture: weight w on an exponential of scale lam, the rest
    generalized-gamma with shape a, scale b and exponent c."""

    w: float
    lam: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not (0.0 <= self.w <= 1.0):
            raise ValueError(f"mixture weight must lie in [0, 1], got {self.w}")
        if min(self.lam, self.a, self.b, self.c) <= 0:
            raise ValueError("lam, a, b, c must be positive")


@dataclass(frozen=True)
class PointingParams:
    """Misalignment fading: peak collected fraction a0 and jitter ratio xi."""

    a0: float
    xi: float

    def __post_init__(self):
        if not (0.0 < self.a0 <= 1.0):
            raise ValueError(f"a0 must lie in (0, 1], got {self.a0}")
        if self.xi <= 0:
            raise ValueError("xi must be positive")

    @property
    def xi2(self):
        return self.xi * self.xi


@dataclass(frozen=True)
class UowcLinkParams:
    """Optical hop budget.  n0 is treated as total noise power in watts for
    the configured bandwidth (default 1 Hz)."""

    eta: float
    p2: float
    n0: float
    pr: float
    bandwidth: float = 1.0

    def __post_init__(self):
        if min(self.eta, self.p2, self.n0, self.pr, self.bandwidth) <= 0:
            raise ValueError("all optical-budget fields must be positive")

    @property
    def noise_power(self):
        return self.n0 * self.bandwidth


@dataclass(frozen=True)
class LinkBudget:
    """Derived link quantities shared by every outage method."""

    g1: float
    mu1: float
    c_const: float
    g_relay_sq: float
    mean_i: float
    mean_i2: float
    mu2: float
    avg_snr2: float
    rho: float


@dataclass(frozen=True)
class WaterPreset:
    salinity: str
    bubble_level: float
    egg: EggParams


def _presets():
    rows = [
        ("salty", 4.7, 0.2064, 0.3953, 0.5307, 1.2154, 35.7368),
        ("salty", 7.1, 0.4344, 0.4747, 0.3935, 1.4506, 77.0245),
        ("salty", 16.5, 0.4951, 0.1368, 0.0161, 3.2033, 82.1030),
        ("fresh", 4.7, 0.2190, 0.4603, 1.2526, 1.1501, 41.3258),
        ("fresh", 7.1, 0.3489, 0.4771, 0.4319, 1.4531, 74.3650),
        ("fresh", 16.5, 0.5117, 0.1602, 0.0075, 2.9963, 216.8356),
    ]
    reg = {}
    for sal, bl, w, lam, a, b, c in rows:
        key = f"{sal}/{bl}"
        reg[key] = WaterPreset(sal, bl, EggParams(w=w, lam=lam, a=a, b=b, c=c))
    return reg


# Laboratory-fitted turbulence mixtures, keyed "<salinity>/<bubble level>".
WATER_PRESETS = _presets()


def get_preset(key: str) -> WaterPreset:
    try:
        return WATER_PRESETS[key]
    except KeyError:
        known = ", ".join(sorted(WATER_PRESETS))
        raise KeyError(f"unknown water preset {key!r}; expected one of {known}") from None


# ---------------------------------------------------------------------------
# RF hop
# ---------------------------------------------------------------------------


def rf_avg_power_gain(params: RfLinkParams) -> float:
    """Average RF path power gain g1 = g0 / (R^2 + L^2)."""
    return params.g0 / (params.radius_r ** 2 + params.height_l ** 2)


def rf_avg_snr(params: RfLinkParams) -> float:
    """Average per-relay RF SNR mu1 = P1 g1 / sigma1^2."""
    return params.p1 * rf_avg_power_gain(params) / params.sigma1_sq


def rf_snr_pdf(x, mu1: float, n_relays: int):
    """Density of the selected (maximum of N exponential) first-hop SNR."""
    if mu1 <= 0:
        raise ValueError("mu1 must be positive")
    n = _check_n(n_relays)
    x = np.asarray(x, dtype=float)
    u = x / mu1
    # n * (1 - e^{-u})^{n-1} * e^{-u} / mu1, the stable product form of the
    # alternating binomial sum
    base = -np.expm1(-u)
    out = n * base ** (n - 1) * np.exp(-u) / mu1
    out = np.where(x < 0, 0.0, out)
    return float(out) if np.isscalar(x) or out.ndim == 0 else out


def rf_snr_pdf_sum(x, mu1: float, n_relays: int):
    """Literal alternating-sum form of rf_snr_pdf (identity-check oracle)."""
    n = _check_n(n_relays)
    terms = [
        math.comb(n - 1, k) * (-1.0) ** k / mu1 * math.exp(-(k + 1) * x / mu1)
        for k in range(n)
    ]
    return n * math.fsum(terms)


def rf_snr_cdf(x, mu1: float, n_relays: int):
    """CDF of the selected first-hop SNR, (1 - e^{-x/mu1})^N."""
    if mu1 <= 0:
        raise ValueError("mu1 must be positive")
    n = _check_n(n_relays)
    x = np.asarray(x, dtype=float)
    base = -np.expm1(-x / mu1)
    out = np.where(x < 0, 0.0, base ** n)
    return float(out) if np.isscalar(x) or out.ndim == 0 else out


def rf_snr_cdf_sum(x, mu1: float, n_relays: int):
    """Literal alternating-sum form of rf_snr_cdf (identity-check oracle)."""
    n = _check_n(n_relays)
    terms = [
        math.comb(n - 1, k) * (-1.0) ** k / (k + 1) * math.exp(-(k + 1) * x / mu1)
        for k in range(n)
    ]
    return 1.0 - n * math.fsum(terms)


def relay_constant_c(mu1: float, n_relays: int) -> float:
    """Fixed-gain relay constant C = 1 + E[selected first-hop SNR]."""
    if mu1 <= 0:
        raise ValueError("mu1 must be positive")
    n = _check_n(n_relays)
    terms = [
        math.comb(n - 1, k) * (-1.0) ** k * mu1 / (k + 1) ** 2 for k in range(n)
    ]
    return 1.0 + n * math.fsum(terms)


def relay_gain_sq(uowc: UowcLinkParams, sigma1_sq: float, c_const: float,
                  gain_convention: str = "squared") -> float:
    """Squared relay amplification from statistical channel knowledge.

    The 'squared' convention reads the relay-power budget as defining G^2
    directly (the usual fixed-gain normalization); 'literal' squares it.
    """
    if sigma1_sq <= 0 or c_const < 1.0:
        raise ValueError("need sigma1_sq > 0 and c_const >= 1")
    g = uowc.pr / (sigma1_sq * c_const)
    if gain_convention == "squared":
        return g
    if gain_convention == "literal":
        return g * g
    raise ValueError(f"unknown gain convention {gain_convention!r}")


def _check_n(n_relays) -> int:
    n = int(n_relays)
    if not (1 <= n <= MAX_RELAYS):
        raise ValueError(f"n_relays must be in 1..{MAX_RELAYS}")
    return n


# ---------------------------------------------------------------------------
# optical hop
# ---------------------------------------------------------------------------


def egg_moment(n: int, egg: EggParams, pointing: PointingParams) -> float:
    """n-th moment of the combined irradiance I = I_turb * I_point."""
    if n < 0 or n != int(n):
        raise ValueError("moment order must be a non-negative integer")
    n = int(n)
    xi2 = pointing.xi2
    point = xi2 / (n + xi2)
    exp_part = egg.w * (egg.lam * pointing.a0) ** n * math.factorial(n)
    gg_part = ((1.0 - egg.w) * (egg.b * pointing.a0) ** n
               * math.exp(ln_gamma(egg.a + n / egg.c) - ln_gamma(egg.a)))
    return (exp_part + gg_part) * point


def uowc_budget(uowc: UowcLinkParams, egg: EggParams, pointing: PointingParams,
                g_relay_sq: float, rho_convention: str = "as-written"):
    """Optical-hop budget fragment (E[I], E[I^2], mu2, avg SNR, rho).

    rho is the scale constant of the optical SNR distribution.  'as-written'
    compounds the irradiance normalization twice (rho = avg_snr2 / E[I]^2);
    'mu2' uses the average electrical SNR directly.
    """
    if g_relay_sq <= 0:
        raise ValueError("g_relay_sq must be positive")
    mean_i = egg_moment(1, egg, pointing)
    mean_i2 = egg_moment(2, egg, pointing)
    mu2 = g_relay_sq * (uowc.p2 * uowc.eta * mean_i) ** 2 / uowc.noise_power
    avg_snr2 = mu2 * mean_i2 / mean_i ** 2
    if rho_convention == "as-written":
        rho = avg_snr2 / mean_i ** 2
    elif rho_convention == "mu2":
        rho = mu2
    else:
        raise ValueError(f"unknown rho convention {rho_convention!r}")
    return mean_i, mean_i2, mu2, avg_snr2, rho


def _pdf_specs(egg: EggParams, pointing: PointingParams):
    xi2 = pointing.xi2
    s1 = MeijerGSpec(m=2, n=0, a=(xi2 + 1.0,), b=(1.0, xi2))
    s2 = MeijerGSpec(m=2, n=0, a=(xi2 / egg.c + 1.0,), b=(egg.a, xi2 / egg.c))
    return s1, s2


def _cdf_specs(egg: EggParams, pointing: PointingParams):
    xi2 = pointing.xi2
    s1 = MeijerGSpec(m=2, n=1, a=(1.0, xi2 + 1.0), b=(1.0, xi2, 0.0))
    s2 = MeijerGSpec(m=2, n=1, a=(1.0, xi2 / egg.c + 1.0),
                     b=(egg.a, xi2 / egg.c, 0.0))
    return s1, s2


def uowc_snr_pdf(x, budget: LinkBudget, egg: EggParams, pointing: PointingParams,
                 opts: EvalOptions = DEFAULT_OPTIONS):
    """Density of the optical-hop SNR under turbulence plus misalignment."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("optical SNR density requires x > 0")
    flat = x.reshape(-1)
    out = _pdf_times_x(np.log(flat), budget, egg, pointing, opts) / flat
    out = out.reshape(x.shape)
    return float(out) if np.isscalar(x) or x.ndim == 0 else out


def _pdf_times_x(ln_x, budget: LinkBudget, egg: EggParams,
                 pointing: PointingParams, opts: EvalOptions = DEFAULT_OPTIONS):
    """x * pdf(x) evaluated from log-SNR, the natural quadrature integrand."""
    ln_x = np.asarray(ln_x, dtype=float)
    xi2 = pointing.xi2
    s1, s2 = _pdf_specs(egg, pointing)
    out = np.zeros_like(ln_x)
    if egg.w > 0.0:
        ln_z1 = ln_x - math.log(egg.lam * pointing.a0 * budget.rho)
        out += egg.w * xi2 * meijer_g_batch(s1, ln_z1, opts)
    if egg.w < 1.0:
        ln_z2 = egg.c * (ln_x - math.log(egg.b * pointing.a0 * budget.rho))
        g2 = meijer_g_batch(s2, ln_z2, opts)
        out += (1.0 - egg.w) * xi2 * math.exp(-ln_gamma(egg.a)) * g2
    return out


def uowc_snr_cdf(x, budget: LinkBudget, egg: EggParams, pointing: PointingParams,
                 opts: EvalOptions = DEFAULT_OPTIONS):
    """CDF of the optical-hop SNR; monotone with limits 0 and 1."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("optical SNR CDF requires x > 0")
    xi2 = pointing.xi2
    s1, s2 = _cdf_specs(egg, pointing)
    flat = np.log(x.reshape(-1))
    out = np.zeros_like(flat)
    if egg.w > 0.0:
        ln_z1 = flat - math.log(egg.lam * pointing.a0 * budget.rho)
        out += egg.w * xi2 * meijer_g_batch(s1, ln_z1, opts)
    if egg.w < 1.0:
        ln_z2 = egg.c * (flat - math.log(egg.b * pointing.a0 * budget.rho))
        g2 = meijer_g_batch(s2, ln_z2, opts)
        out += (1.0 - egg.w) * xi2 / egg.c * math.exp(-ln_gamma(egg.a)) * g2
    out = np.clip(out, 0.0, 1.0).reshape(x.shape)
    return float(out) if np.isscalar(x) or x.ndim == 0 else out
