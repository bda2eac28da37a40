"""Air-to-ground path loss, Nakagami-m power laws and best-of-Z order statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import stats

from .sysmodel import ConfigError, Coord3, EnvProfile

__all__ = [
    "FadingSpec",
    "LinkGeometry",
    "OrderStatTerm",
    "enumerate_orderstat_terms",
    "gamma_power_cdf",
    "gamma_power_pdf",
    "link_geometry",
    "orderstat_cdf",
    "orderstat_pdf",
    "orderstat_upper",
    "sample_best_of",
    "sample_channel_power",
]


@dataclass(frozen=True)
class LinkGeometry:
    distance: float
    elevation: float
    mean_path_loss: float


@dataclass(frozen=True)
class FadingSpec:
    m: int
    xi: float

    @property
    def rate(self) -> float:
        """``m / xi``, the rate of the Gamma power law."""
        return self.m / self.xi


@dataclass(frozen=True)
class OrderStatTerm:
    """One summand of the expanded ``[F(u)]**(Z-1)`` series.

    ``indices`` holds ``(p_1, ..., p_{m-1})``; ``pbar`` is the extra power of
    ``u`` the term carries.
    """

    p: int
    indices: tuple[int, ...]
    coefficient: float
    pbar: int


def _los_blend(env: EnvProfile, elevation, variant: str = "as-printed"):
    scale = env.c / (4.0 * math.pi * env.f_c)
    power = 2 if variant == "fspl-squared" else 1
    k_los = env.mu_los * scale ** -power
    k_nlos = env.mu_nlos * scale ** -power
    sig = 1.0 + env.tau1 * np.exp(-(180.0 / math.pi) * env.tau2 * elevation
                                  + env.tau2 * env.tau1)
    return k_nlos + (k_los - k_nlos) / sig


def link_geometry(a: Coord3, b: Coord3, env: EnvProfile,
                  variant: str = "as-printed") -> LinkGeometry:
    """Distance, elevation angle and mean path loss between two nodes.

    The elevation is ``arcsin(|h_a - h_b| / D)``, which is the UAV altitude
    over distance on every UAV leg and zero between two ground nodes.
    """
    d = math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.h - a.h) ** 2)
    if d == 0:
        raise ConfigError("degenerate-link", "coords", f"{a} and {b} coincide")
    elev = math.asin(min(1.0, abs(b.h - a.h) / d))
    pl = float(_los_blend(env, elev, variant)) * d ** env.theta
    return LinkGeometry(distance=d, elevation=elev, mean_path_loss=pl)


def gamma_power_pdf(u, spec: FadingSpec):
    u = np.asarray(u, dtype=float)
    lam = spec.rate
    return u ** (spec.m - 1) / math.factorial(spec.m - 1) * lam ** spec.m * np.exp(-lam * u)


def gamma_power_cdf(u, spec: FadingSpec):
    u = np.asarray(u, dtype=float)
    lu = spec.rate * u
    tail = sum(lu ** s / math.factorial(s) for s in range(spec.m))
    return 1.0 - np.exp(-lu) * tail


def _compositions(p: int, parts: int):
    """Nested index tuples ``p_1 <= p, p_2 <= p - p_1, ...`` of length ``parts``."""
    if parts == 0:
        yield ()
        return
    for first in range(p + 1):
        for rest in _compositions(p - first, parts - 1):
            yield (first, *rest)


def _log_comb(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


@lru_cache(maxsize=256)
def _terms(Z: int, m: int, xi: float, power: int) -> tuple[OrderStatTerm, ...]:
    # power = Z - 1 for the pdf series, Z for the cdf series
    lam = m / xi
    exact = m + Z <= 20
    out = []
    for p in range(power + 1):
        for idx in _compositions(p, m - 1):
            rest = p - sum(idx)
            # counts of the s-th series term: idx[s] for s = 0..m-2, rest for s = m-1
            counts = (*idx, rest)
            pbar = sum(s * c for s, c in enumerate(counts))
            if exact:
                phi1 = math.comb(power, p)
                left = p
                for c in idx:
                    phi1 *= math.comb(left, c)
                    left -= c
                phi2 = 1.0
                for s, c in enumerate(counts):
                    phi2 *= (lam ** s / math.factorial(s)) ** c
                coef = (-1) ** p * phi1 * phi2
            else:
                logc = _log_comb(power, p)
                left = p
                for c in idx:
                    logc += _log_comb(left, c)
                    left -= c
                for s, c in enumerate(counts):
                    logc += c * (s * math.log(lam) - math.lgamma(s + 1))
                coef = (-1) ** p * math.exp(logc)
            out.append(OrderStatTerm(p=p, indices=tuple(idx), coefficient=coef, pbar=pbar))
    return tuple(out)


def enumerate_orderstat_terms(Z: int, spec: FadingSpec) -> list[OrderStatTerm]:
    """Expand ``[F(u)]**(Z-1)`` into ``sum coef * u**pbar * exp(-p*m*u/xi)``.

    The expansion uses nested binomial products over the counts of each
    truncated-exponential series term, so ``pbar`` equals
    ``(m-1)(p-p_1) - (m-2)p_2 - ... - p_{m-1}``.
    """
    if Z < 1 or spec.m < 2:
        raise ValueError("need Z >= 1 and m >= 2")
    return list(_terms(Z, spec.m, float(spec.xi), Z - 1))


def orderstat_density_scale(Z: int, spec: FadingSpec) -> float:
    """Leading constant ``Z / (m-1)! * (m/xi)**m`` of the best-of-Z density."""
    return Z / math.factorial(spec.m - 1) * spec.rate ** spec.m


def orderstat_pdf(u, Z: int, spec: FadingSpec):
    u = np.asarray(u, dtype=float)
    lam = spec.rate
    acc = np.zeros_like(u)
    for t in enumerate_orderstat_terms(Z, spec):
        acc = acc + t.coefficient * u ** (spec.m - 1 + t.pbar) * np.exp(-lam * u * (t.p + 1))
    return orderstat_density_scale(Z, spec) * acc


def orderstat_cdf(u, Z: int, spec: FadingSpec):
    if spec.m < 2:
        raise ValueError("series form needs m >= 2")
    u = np.asarray(u, dtype=float)
    lam = spec.rate
    acc = np.zeros_like(u)
    for t in _terms(Z, spec.m, float(spec.xi), Z):
        acc = acc + t.coefficient * u ** t.pbar * np.exp(-lam * u * t.p)
    return acc


def orderstat_upper(Z: int, spec: FadingSpec, tail: float = 1e-16) -> float:
    """A power level the best of ``Z`` draws exceeds with probability <= ``tail``."""
    # P(max > u) <= Z * P(X > u)
    return float(stats.gamma.isf(tail / Z, spec.m, scale=1.0 / spec.rate))


def sample_channel_power(spec: FadingSpec, rng: np.random.Generator, size=None):
    return rng.gamma(spec.m, 1.0 / spec.rate, size=size)


def sample_best_of(Z: int, spec: FadingSpec, rng: np.random.Generator, size=None):
    """Largest of ``Z`` independent channel powers (per output element)."""
    shape = (Z,) if size is None else (*np.atleast_1d(size), Z)
    draws = rng.gamma(spec.m, 1.0 / spec.rate, size=shape)
    return draws.max(axis=-1)


def count_terms(Z: int, m: int) -> int:
    return sum(1 for p in range(Z) for _ in _compositions(p, m - 1))
