"""Closed-form SSCP evaluators for imperfect SIC (Lemma 1) and perfect SIC (Lemma 2).

Both lemmas integrate the success region over the best-device powers ``b``
(outer, order ``O``) and ``a`` (inner, order ``N``) with Gauss-Chebyshev
quadrature; the eavesdropper powers ``x`` and ``y`` are integrated in closed
form.  The code keeps the printed grouping of terms:

* Lemma 1: ``psi1c * sum_h sum_t Psi1 Psi2 [d1 - d2 - d3 (d4 - d5)]``
* Lemma 2: ``psi2c * sum_h sum_t Psi3 [Psi4 (d1 - d6) - Psi5 d7 (d8 - d9)]``

where the ``Psi`` sums run over quadrature nodes and the ``d`` terms are
evaluated at each node.  Node-dependent factors are computed as arrays of
shape ``(O, N)``; the final reduction over outer nodes uses ``math.fsum``
because the order-statistic coefficients alternate in sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import (
    FadingSpec,
    enumerate_orderstat_terms,
    orderstat_density_scale,
    orderstat_upper,
)
from .protocol import Thresholds, ZCoeffs, thresholds, z_coefficients
from .sysmodel import ConfigError, ScenarioConfig, SscpEstimate, validate_config

__all__ = [
    "InvalidLimits",
    "QuadratureGrid",
    "chebyshev_grid",
    "chebyshev_nodes",
    "sscp_analytic",
    "sscp_isic",
    "sscp_psic",
]


class InvalidLimits(ValueError):
    """Inner quadrature interval is empty (upper limit below lower limit)."""


@dataclass(frozen=True)
class QuadratureGrid:
    """Gauss-Chebyshev nodes after the lemma-specific change of variables.

    ``phi_*`` are the raw cosine nodes, ``omega_*`` the mapped abscissae and
    ``wp_*`` the derived power levels (``-1/ln omega`` or ``-ln omega``).
    For Lemma 1 the inner ``omega_n`` are the ``a`` values themselves and
    ``wp_n`` is ``None``.
    """

    mapping: str
    phi_o: np.ndarray
    omega_o: np.ndarray
    wp_o: np.ndarray
    phi_n: np.ndarray
    omega_n: np.ndarray | None = None
    wp_n: np.ndarray | None = None


def chebyshev_nodes(n: int) -> np.ndarray:
    k = np.arange(1, n + 1)
    return np.cos(np.pi * (2 * k - 1) / (2 * n))


def chebyshev_grid(O: int, N: int, mapping: str = "lemma-1", *,
                   delta1=None, delta3=None, delta2: float = 0.0) -> QuadratureGrid:
    """Build the nested node sets of either lemma.

    Lemma 1 maps the outer nodes onto ``b in (0, inf)`` through
    ``omega = (phi+1)/2, wp = -1/ln omega`` and the inner nodes linearly onto
    ``[delta1, delta3]`` (one interval per outer node).  Lemma 2 maps the
    outer nodes onto ``[delta2, inf)`` with ``omega = (phi+1) e^{-delta2}/2,
    wp = -ln omega`` and the inner nodes onto ``[delta1, inf)`` likewise.
    Inner arrays are only built when ``delta1`` is supplied.
    """
    if O < 1 or N < 1:
        raise ValueError("quadrature orders must be >= 1")
    phi_o = chebyshev_nodes(O)
    phi_n = chebyshev_nodes(N)
    if mapping == "lemma-1":
        omega_o = (phi_o + 1.0) / 2.0
        wp_o = -1.0 / np.log(omega_o)
        omega_n = None
        if delta1 is not None:
            d1 = np.asarray(delta1, dtype=float)[..., None]
            d3 = np.asarray(delta3, dtype=float)[..., None]
            if np.any(d3 < d1):
                raise InvalidLimits("delta3 < delta1")
            omega_n = (phi_n + 1.0) * (d3 - d1) / 2.0 + d1
        return QuadratureGrid(mapping, phi_o, omega_o, wp_o, phi_n, omega_n)
    if mapping == "lemma-2":
        omega_o = (phi_o + 1.0) * math.exp(-delta2) / 2.0
        # -ln(omega) written so that a large delta2 does not underflow omega
        wp_o = delta2 - np.log((phi_o + 1.0) / 2.0)
        omega_n = wp_n = None
        if delta1 is not None:
            d1 = np.asarray(delta1, dtype=float)[..., None]
            omega_n = (phi_n + 1.0) * np.exp(-d1) / 2.0
            wp_n = d1 - np.log((phi_n + 1.0) / 2.0)
        return QuadratureGrid(mapping, phi_o, omega_o, wp_o, phi_n, omega_n, wp_n)
    raise ValueError(f"unknown mapping {mapping!r}")


# --------------------------------------------------------------------------
# shared closed-form pieces


def _lower_gamma_tail(n: int, lam, upper):
    """``sum_k n!/k! upper^k / lam^(n+1-k) * exp(-lam*upper)`` (the subtracted
    part of ``int_0^upper y^n e^{-lam y} dy``)."""
    acc = 0.0
    for k in range(n + 1):
        acc = acc + math.factorial(n) / math.factorial(k) * upper ** k / lam ** (n + 1 - k)
    return np.exp(-lam * upper) * acc


def _eve_pieces(m: int, lam_fe: float, lam_ne: float, z: ZCoeffs, theta1, y_upper):
    """Closed form of the eavesdropper integral, scaled by ``(m-1)!/lam_ne^m``.

    Returns ``(d1, d2, d3 (d4 - d5))``; Lemma 2 names the same three pieces
    ``d1, d6, d7 (d8 - d9)``.
    """
    d1 = math.factorial(m - 1) / lam_ne ** m
    d2 = _lower_gamma_tail(m - 1, lam_ne, y_upper)
    theta3 = lam_ne + lam_fe * z.z6 * theta1 / z.z7
    ratio = z.z6 / z.z7
    cross = 0.0
    for s in range(m):
        coef = lam_fe ** s / math.factorial(s) * theta1 ** s
        for k2 in range(s + 1):
            n = m - 1 + k2
            d4 = math.factorial(n) / theta3 ** (n + 1)
            d5 = _lower_gamma_tail(n, theta3, y_upper)
            cross = cross + coef * math.comb(s, k2) * ratio ** k2 * (d4 - d5)
    return d1, d2, np.exp(-lam_fe * theta1) * cross


def _specs(cfg: ScenarioConfig):
    m = cfg.m
    return (FadingSpec(m, cfg.xi_fu), FadingSpec(m, cfg.xi_nu),
            FadingSpec(m, cfg.xi_fe), FadingSpec(m, cfg.xi_ne))


def _prep(cfg: ScenarioConfig, need_nu1: bool):
    validate_config(cfg, analytic=True)
    if need_nu1 and not cfg.nu1 > 0:
        raise ConfigError("analytic-unsupported", "nu1", "Lemma 1 needs nu1 > 0; use sscp_psic")
    if not need_nu1 and cfg.nu1 != 0:
        raise ConfigError("analytic-unsupported", "nu1", "Lemma 2 needs nu1 = 0; use sscp_isic")
    return z_coefficients(cfg), thresholds(cfg)


def _certain(cfg: ScenarioConfig, thr: Thresholds, method: str) -> SscpEstimate | None:
    # zero-size tasks: every constraint holds trivially
    if thr.c_off_f == 0 and thr.c_off_n == 0:
        return SscpEstimate(1.0, method, quad_orders=(cfg.quad_o, cfg.quad_n))
    return None


# --------------------------------------------------------------------------
# Lemma 1


def sscp_isic(cfg: ScenarioConfig, *, O: int | None = None, N: int | None = None,
              inner: str | None = None) -> SscpEstimate:
    """SSCP with imperfect SIC (``nu1 > 0``).

    ``inner="clipped"`` caps the inner upper limit ``Delta_3`` at a power the
    best far device exceeds with probability below 1e-16; the printed limit
    can be thousands of times wider than the support of ``f_a`` when the
    rate thresholds are small, which starves the inner Chebyshev rule.
    ``inner="as-printed"`` uses ``Delta_3`` unchanged.
    """
    z, thr = _prep(cfg, need_nu1=True)
    O = O or cfg.quad_o
    N = N or cfg.quad_n
    inner = inner or cfg.lemma1_inner
    method = "lemma-1"
    if (hit := _certain(cfg, thr, method)) is not None:
        return hit
    spec_fu, spec_nu, spec_fe, spec_ne = _specs(cfg)
    m, nu1 = cfg.m, cfg.nu1
    lam_fu, lam_nu, lam_fe, lam_ne = (s.rate for s in (spec_fu, spec_nu, spec_fe, spec_ne))
    zeta_f, zeta_n, del_f, del_n = thr.zeta_f, thr.zeta_n, thr.del_f, thr.del_n

    grid = chebyshev_grid(O, N, "lemma-1")
    wp = grid.wp_o
    delta1 = np.sqrt(zeta_f * (z.z2 * wp ** 2 + z.z3) / z.z1)
    delta3_sq = (z.z2 * wp ** 2 - z.z4 * zeta_n) / (nu1 * z.z1 * zeta_n)
    delta3 = np.sqrt(np.maximum(delta3_sq, 0.0))
    if inner == "clipped":
        delta3 = np.minimum(delta3, orderstat_upper(cfg.K, spec_fu))
    elif inner != "as-printed":
        raise ValueError(f"unknown inner-limit variant {inner!r}")
    live = (delta3_sq > 0) & (delta3 > delta1)
    if not live.any():
        return SscpEstimate(0.0, method, quad_orders=(O, N), extra={"inner": inner})

    wp = wp[live]
    w_o = grid.omega_o[live]
    sq_o = np.sqrt(1.0 - grid.phi_o[live] ** 2)
    lo, hi = delta1[live], delta3[live]
    a = chebyshev_grid(O, N, "lemma-1", delta1=lo, delta3=hi).omega_n  # (O', N)
    sq_n = np.sqrt(1.0 - grid.phi_n ** 2)
    wp2 = wp[:, None] ** 2

    delta4 = (1.0 + z.z2 * wp2 / (nu1 * z.z1 * a ** 2 + z.z4) - del_n) * z.z8 / (z.z6 * del_n)
    delta4 = np.maximum(delta4, 0.0)
    theta1 = (1.0 + z.z1 * a ** 2 / (z.z2 * wp2 + z.z3) - del_f) * z.z7 / (z.z5 * del_f)
    theta1 = np.maximum(theta1, 0.0)
    d1, d2, d345 = _eve_pieces(m, lam_fe, lam_ne, z, theta1, delta4)
    bracket = d1 - d2 - d345

    # Psi_2 (inner sum over n) for every t-term, folded into one array
    psi2 = np.zeros_like(a)
    for t in enumerate_orderstat_terms(cfg.K, spec_fu):
        psi2 += t.coefficient * a ** (m - 1 + t.pbar) * np.exp(-lam_fu * (t.p + 1) * a)
    inner_sum = (sq_n * psi2 * bracket).sum(axis=1)

    # Psi_1 (outer sum over o) for every h-term
    psi1 = np.zeros_like(wp)
    log_w = np.log(w_o)
    for h in enumerate_orderstat_terms(cfg.Q, spec_nu):
        expo = wp ** 2 * lam_nu * (h.p + 1) - 1.0
        psi1 += h.coefficient * wp ** (m - 1 + h.pbar) * w_o ** expo
    outer_terms = sq_o * psi1 * (hi - lo) / log_w ** 2 * inner_sum

    psi1c = (math.pi ** 2 * orderstat_density_scale(cfg.K, spec_fu)
             * orderstat_density_scale(cfg.Q, spec_nu)
             / (4 * N * O * math.factorial(m - 1)) * lam_ne ** m)
    value = psi1c * math.fsum(outer_terms.tolist())
    return SscpEstimate(value, method, quad_orders=(O, N), extra={"inner": inner})


# --------------------------------------------------------------------------
# Lemma 2


def sscp_psic(cfg: ScenarioConfig, *, O: int | None = None,
              N: int | None = None) -> SscpEstimate:
    """SSCP with perfect SIC (``nu1 = 0``)."""
    z, thr = _prep(cfg, need_nu1=False)
    O = O or cfg.quad_o
    N = N or cfg.quad_n
    method = "lemma-2"
    if (hit := _certain(cfg, thr, method)) is not None:
        return hit
    spec_fu, spec_nu, spec_fe, spec_ne = _specs(cfg)
    m = cfg.m
    lam_fu, lam_nu, lam_fe, lam_ne = (s.rate for s in (spec_fu, spec_nu, spec_fe, spec_ne))
    zeta_f, zeta_n, del_f, del_n = thr.zeta_f, thr.zeta_n, thr.del_f, thr.del_n

    delta2 = math.sqrt(z.z4 * zeta_n / z.z2)
    outer = chebyshev_grid(O, N, "lemma-2", delta2=delta2)
    wp_o = outer.wp_o
    delta1 = np.sqrt(zeta_f * (z.z2 * wp_o ** 2 + z.z3) / z.z1)
    grid = chebyshev_grid(O, N, "lemma-2", delta2=delta2, delta1=delta1)
    wp_n = grid.wp_n  # (O, N)
    sq_o = np.sqrt(1.0 - outer.phi_o ** 2)
    sq_n = np.sqrt(1.0 - grid.phi_n ** 2)

    delta5 = (1.0 + z.z2 * wp_o ** 2 / z.z4 - del_n) * z.z8 / (z.z6 * del_n)
    delta5 = np.maximum(delta5, 0.0)
    theta1 = (1.0 + z.z1 * wp_n ** 2 / (z.z2 * wp_o[:, None] ** 2 + z.z3) - del_f) \
        * z.z7 / (z.z5 * del_f)
    theta1 = np.maximum(theta1, 0.0)
    d1, _, d789 = _eve_pieces(m, lam_fe, lam_ne, z, theta1, delta5[:, None])
    d6 = _lower_gamma_tail(m - 1, lam_ne, delta5)

    total = np.zeros_like(wp_o)
    for t in enumerate_orderstat_terms(cfg.K, spec_fu):
        n_t = m - 1 + t.pbar
        mu_t = lam_fu * (t.p + 1)
        psi4 = _upper_gamma(n_t, mu_t, delta1)
        # Psi_5: e^{-Delta1} omega_n^{mu_t - 1} evaluated in log space
        w5 = np.exp(-delta1[:, None] - wp_n * (mu_t - 1.0))
        psi5 = math.pi / (2 * N) * (sq_n * wp_n ** n_t * w5 * d789).sum(axis=1)
        total += t.coefficient * (psi4 * (d1 - d6) - psi5)

    psi3 = np.zeros_like(wp_o)
    for h in enumerate_orderstat_terms(cfg.Q, spec_nu):
        mu_h = lam_nu * (h.p + 1)
        # omega_o^{mu_h - 1} in log space
        psi3 += h.coefficient * wp_o ** (m - 1 + h.pbar) * np.exp(-wp_o * (mu_h - 1.0))
    outer_terms = sq_o * psi3 * total

    psi2c = (math.pi * math.exp(-delta2) * orderstat_density_scale(cfg.K, spec_fu)
             * orderstat_density_scale(cfg.Q, spec_nu)
             / (2 * O * math.factorial(m - 1)) * lam_ne ** m)
    value = psi2c * math.fsum(outer_terms.tolist())
    return SscpEstimate(value, method, quad_orders=(O, N))


def _upper_gamma(n: int, mu: float, lower):
    """``int_lower^inf a^n e^{-mu a} da`` in its finite-sum form."""
    acc = 0.0
    for k in range(n + 1):
        acc = acc + math.factorial(n) / math.factorial(k) * lower ** k / mu ** (n + 1 - k)
    return np.exp(-mu * lower) * acc


def sscp_analytic(cfg: ScenarioConfig, **kw) -> SscpEstimate:
    """Dispatch to Lemma 2 when ``nu1 == 0`` and to Lemma 1 otherwise."""
    if cfg.nu1 == 0:
        kw.pop("inner", None)
        return sscp_psic(cfg, **kw)
    return sscp_isic(cfg, **kw)
