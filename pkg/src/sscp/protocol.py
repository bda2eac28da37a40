"""Per-realization protocol mechanics: EH, SINRs, capacities and the success event.

All functions accept scalars or numpy arrays for the channel powers so the
Monte-Carlo driver can push whole batches through the same code path.

Two quirks of the model are kept verbatim.  The UAV-side SINRs square the
channel powers ``a`` and ``b`` (the analytic limits are square roots because
of this), and the ICSI variances enter the UAV-side constants squared but the
eavesdropper-side constants linearly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .channel import LinkGeometry, link_geometry
from .sysmodel import PhaseTiming, ScenarioConfig, offload_bits, phase_timing

__all__ = [
    "ChannelDraw",
    "Links",
    "SecrecySnapshot",
    "Thresholds",
    "ZCoeffs",
    "capacities_and_secrecy",
    "harvested_energy",
    "scenario_links",
    "sinrs",
    "success_event",
    "threshold_event",
    "thresholds",
    "z_coefficients",
]


@dataclass(frozen=True)
class Links:
    fu: LinkGeometry
    nu: LinkGeometry
    fe: LinkGeometry
    ne: LinkGeometry


@dataclass(frozen=True)
class ZCoeffs:
    z1: float
    z2: float
    z3: float
    z4: float
    z5: float
    z6: float
    z7: float
    z8: float
    gamma_fu: float
    gamma_nu: float


@dataclass(frozen=True)
class ChannelDraw:
    a: float  # |g_F*U|^2
    b: float  # |g_N*U|^2
    x: float  # |g_F*E|^2
    y: float  # |g_N*E|^2


@dataclass(frozen=True)
class Thresholds:
    c_off_f: float
    c_off_n: float
    r_f: float
    r_n: float
    zeta_f: float
    zeta_n: float
    del_f: float
    del_n: float
    t_th: float


@dataclass(frozen=True)
class SecrecySnapshot:
    sinr_f_u: object
    sinr_n_u: object
    sinr_f_e: object
    sinr_n_e: object
    cap_f_u: object
    cap_n_u: object
    cap_f_e: object
    cap_n_e: object
    sec_f: object
    sec_n: object
    t_off_f: object = None
    t_off_n: object = None
    success: object = None


def scenario_links(cfg: ScenarioConfig) -> Links:
    """Geometry of the four links used by the selected devices."""
    env, v = cfg.env, cfg.pathloss_variant
    return Links(
        fu=link_geometry(cfg.far, cfg.uav, env, v),
        nu=link_geometry(cfg.near, cfg.uav, env, v),
        fe=link_geometry(cfg.far, cfg.eve, env, v),
        ne=link_geometry(cfg.near, cfg.eve, env, v),
    )


def z_coefficients(cfg: ScenarioConfig, links: Links | None = None,
                   timing: PhaseTiming | None = None) -> ZCoeffs:
    links = links or scenario_links(cfg)
    timing = timing or phase_timing(cfg)
    l_fu = links.fu.mean_path_loss
    l_nu = links.nu.mean_path_loss
    # the device transmit power is its harvested energy spread over the offload window
    eh = cfg.beta * cfg.gamma_u * timing.t_wpt
    window = (1.0 - cfg.eta) * cfg.T - timing.t_com
    gamma_fu = cfg.rho_fu * eh / (l_fu * window)
    gamma_nu = cfg.rho_nu * eh / (l_nu * window)
    z1 = gamma_fu / l_fu
    z2 = gamma_nu / l_nu
    om_fu, om_nu = cfg.omega_fu, cfg.omega_nu
    z3 = z1 * om_fu ** 2 + z2 * om_nu ** 2 + 1.0
    z4 = cfg.nu1 * z1 * om_fu ** 2 + z2 * om_nu ** 2 + 1.0
    z5 = cfg.rho_fe * cfg.gamma_e / links.fe.mean_path_loss
    z6 = cfg.rho_ne * cfg.gamma_e / links.ne.mean_path_loss
    z7 = z5 * cfg.omega_fe + z6 * cfg.omega_ne + 1.0
    z8 = z6 * cfg.omega_ne + 1.0
    return ZCoeffs(z1, z2, z3, z4, z5, z6, z7, z8, gamma_fu, gamma_nu)


def harvested_energy(cfg: ScenarioConfig, link: LinkGeometry, raw_gain,
                     p_u: float | None = None, timing: PhaseTiming | None = None):
    """Energy a device collects during the WPT phase.

    ``p_u`` defaults to ``gamma_U``, i.e. the result is in units of the UAV
    receiver noise power times seconds.
    """
    p_u = cfg.gamma_u if p_u is None else p_u
    t_wpt = (timing or phase_timing(cfg)).t_wpt
    return cfg.beta * p_u * t_wpt * np.asarray(raw_gain, dtype=float) / link.mean_path_loss


def sinrs(z: ZCoeffs, a, b, x, y, nu1: float):
    """SINRs ``(F* at U, N* at U, F* at E, N* at E)``."""
    a2 = np.square(a)
    b2 = np.square(b)
    g_fu = z.z1 * a2 / (z.z2 * b2 + z.z3)
    g_nu = z.z2 * b2 / (nu1 * z.z1 * a2 + z.z4)
    g_fe = z.z5 * x / (z.z6 * y + z.z7)
    g_ne = z.z6 * y / z.z8
    return g_fu, g_nu, g_fe, g_ne


def thresholds(cfg: ScenarioConfig, timing: PhaseTiming | None = None) -> Thresholds:
    timing = timing or phase_timing(cfg)
    t_th = timing.t_th
    c_f, c_n = offload_bits(cfg)
    r_f, r_n = c_f / t_th, c_n / t_th
    ln2 = math.log(2.0)
    return Thresholds(
        c_off_f=c_f, c_off_n=c_n, r_f=r_f, r_n=r_n,
        zeta_f=math.expm1(ln2 * c_f / (cfg.W * t_th ** 2)),
        zeta_n=math.expm1(ln2 * c_n / (cfg.W * t_th ** 2)),
        del_f=2.0 ** (r_f / (cfg.W * t_th)),
        del_n=2.0 ** (r_n / (cfg.W * t_th)),
        t_th=t_th,
    )


def capacities_and_secrecy(sinr, t_th: float, W: float) -> SecrecySnapshot:
    g_fu, g_nu, g_fe, g_ne = sinr
    scale = t_th * W
    cap = [scale * np.log2(1.0 + g) for g in sinr]
    return SecrecySnapshot(
        sinr_f_u=g_fu, sinr_n_u=g_nu, sinr_f_e=g_fe, sinr_n_e=g_ne,
        cap_f_u=cap[0], cap_n_u=cap[1], cap_f_e=cap[2], cap_n_e=cap[3],
        sec_f=np.maximum(0.0, cap[0] - cap[2]),
        sec_n=np.maximum(0.0, cap[1] - cap[3]),
    )


def _offload_time(c_off: float, cap_u):
    cap_u = np.asarray(cap_u, dtype=float)
    if c_off == 0:
        return np.zeros_like(cap_u)
    with np.errstate(divide="ignore"):
        return c_off / cap_u


def success_event(snap: SecrecySnapshot, thr: Thresholds) -> SecrecySnapshot:
    """Fill in offload times and the joint deadline-plus-secrecy event."""
    t_f = _offload_time(thr.c_off_f, snap.cap_f_u)
    t_n = _offload_time(thr.c_off_n, snap.cap_n_u)
    ok = ((t_f <= thr.t_th) & (t_n <= thr.t_th)
          & (snap.sec_f >= thr.r_f) & (snap.sec_n >= thr.r_n))
    return dataclasses.replace(snap, t_off_f=t_f, t_off_n=t_n, success=ok)


def threshold_event(sinr, thr: Thresholds):
    """The same event written as ``gamma_U >= zeta`` and ``(1+gamma_U)/(1+gamma_E) >= del``."""
    g_fu, g_nu, g_fe, g_ne = sinr
    f_ok = (g_fu >= thr.zeta_f) & (((1.0 + g_fu) / (1.0 + g_fe) >= thr.del_f) | (thr.r_f == 0))
    n_ok = (g_nu >= thr.zeta_n) & (((1.0 + g_nu) / (1.0 + g_ne) >= thr.del_n) | (thr.r_n == 0))
    return f_ok & n_ok
