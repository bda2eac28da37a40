"""Scenario configuration, validation, unit helpers and the protocol time budget.

A :class:`ScenarioConfig` is a flat, frozen record of every model input.  The
grouped views (:attr:`ScenarioConfig.uav`, :attr:`ScenarioConfig.env`, ...)
are derived on demand so that sweeps can use :func:`dataclasses.replace` on a
single key.

Config files are YAML mappings.  Keys may be flat (``eta: 0.7``), dotted with
a group prefix (``sysmodel.eta: 0.7``) or nested under a group
(``sysmodel: {eta: 0.7}``).  The aliases ``xi`` and ``omega`` set all four
link classes at once.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

__all__ = [
    "ConfigError",
    "Coord3",
    "EnvProfile",
    "PhaseTiming",
    "ScenarioConfig",
    "SscpEstimate",
    "apply_overrides",
    "coerce_value",
    "is_config_key",
    "db_to_linear",
    "load_config",
    "offload_bits",
    "parse_assignment",
    "phase_timing",
    "validate_config",
]

GROUPS = ("sysmodel", "channel", "protocol", "analytic", "refintegral", "montecarlo")
LINKS = ("fu", "nu", "fe", "ne")


class ConfigError(ValueError):
    """Raised when a configuration violates a model invariant.

    ``code`` is a short machine-readable tag (``eh-ratio-out-of-range``,
    ``nonpositive-offload-window``, ...) and ``key`` names the offending
    field.
    """

    def __init__(self, code: str, key: str, message: str):
        super().__init__(f"{code} [{key}]: {message}")
        self.code = code
        self.key = key


@dataclass(frozen=True)
class Coord3:
    x: float
    y: float
    h: float = 0.0


@dataclass(frozen=True)
class EnvProfile:
    tau1: float
    tau2: float
    mu_los: float
    mu_nlos: float
    theta: float
    c: float
    f_c: float


@dataclass(frozen=True)
class PhaseTiming:
    t_wpt: float
    t_com: float
    t_th: float
    t_down: float = 0.0


# Symbol each config key stands for; used by the CLI help text.
SYMBOLS: dict[str, str] = {
    "x_u": "x_U, UAV x coordinate [m]",
    "y_u": "y_U, UAV y coordinate [m]",
    "h_u": "h_U, UAV altitude [m]",
    "x_f": "x_F, far-cluster x coordinate [m]",
    "y_f": "y_F, far-cluster y coordinate [m]",
    "K": "K, number of far-cluster devices",
    "x_n": "x_N, near-cluster x coordinate [m]",
    "y_n": "y_N, near-cluster y coordinate [m]",
    "Q": "Q, number of near-cluster devices",
    "x_e": "x_E, eavesdropper x coordinate [m]",
    "y_e": "y_E, eavesdropper y coordinate [m]",
    "tau1": "tau_1, LoS sigmoid environment parameter",
    "tau2": "tau_2, LoS sigmoid environment parameter",
    "mu_los": "mu^LoS, LoS excess path loss",
    "mu_nlos": "mu^NLoS, NLoS excess path loss",
    "theta": "theta, path-loss exponent",
    "c": "c, speed of light [m/s]",
    "f_c": "f_c, carrier frequency [Hz]",
    "pathloss_variant": "K^LoS/K^NLoS form: as-printed | fspl-squared",
    "m": "m, Nakagami shape (integer)",
    "xi_fu": "xi_{F*U}, mean channel power F->U",
    "xi_nu": "xi_{N*U}, mean channel power N->U",
    "xi_fe": "xi_{F*E}, mean channel power F->E",
    "xi_ne": "xi_{N*E}, mean channel power N->E",
    "omega_fu": "Omega_{F*U}, ICSI error variance F->U",
    "omega_nu": "Omega_{N*U}, ICSI error variance N->U",
    "omega_fe": "Omega_{F*E}, ICSI error variance F->E",
    "omega_ne": "Omega_{N*E}, ICSI error variance N->E",
    "nu1": "nu_1, residual-SIC factor (0 = perfect SIC)",
    "beta": "beta, energy conversion efficiency",
    "eta": "eta, energy-harvesting time ratio",
    "T": "T, protocol duration [s]",
    "W": "W, bandwidth [Hz]",
    "gamma_u_db": "gamma_U, UAV transmit SNR [dB]",
    "gamma_e_db": "gamma_E, eavesdropper SNR [dB]",
    "rho_fu": "rho_{F*U}, far-device power share at U",
    "rho_nu": "rho_{N*U}, near-device power share at U",
    "rho_fe": "rho_{F*E}, far-device power share at E",
    "rho_ne": "rho_{N*E}, near-device power share at E",
    "l": "l, task length [bits]",
    "sigma_f": "sigma_F, far-device offloading ratio",
    "sigma_n": "sigma_N, near-device offloading ratio",
    "f_mec": "f_MEC, MEC CPU frequency [Hz]",
    "varpi": "varpi, CPU cycles per bit",
    "quad_n": "N, inner Gauss-Chebyshev order",
    "quad_o": "O, outer Gauss-Chebyshev order",
    "lemma1_inner": "Lemma-1 inner upper limit: as-printed | clipped",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Every model input.  Defaults are the shared simulation parameter set."""

    x_u: float = 0.0
    y_u: float = 0.0
    h_u: float = 50.0
    x_f: float = -100.0
    y_f: float = -100.0
    K: int = 1
    x_n: float = 10.0
    y_n: float = 10.0
    Q: int = 1
    x_e: float = 80.0
    y_e: float = 80.0

    tau1: float = 0.1139
    tau2: float = 12.0870
    mu_los: float = 1.6
    mu_nlos: float = 23.0
    theta: float = 2.0
    c: float = 3e8
    f_c: float = 1e5
    pathloss_variant: str = "as-printed"

    m: int = 2
    xi_fu: float = 1.0
    xi_nu: float = 1.0
    xi_fe: float = 1.0
    xi_ne: float = 1.0
    omega_fu: float = 3.0
    omega_nu: float = 3.0
    omega_fe: float = 3.0
    omega_ne: float = 3.0
    nu1: float = 0.4

    beta: float = 0.9
    eta: float = 0.7
    T: float = 1.0
    W: float = 1e8
    gamma_u_db: float = 30.0
    gamma_e_db: float = 10.0
    rho_fu: float = 0.8
    rho_nu: float = 0.2
    rho_fe: float = 0.8
    rho_ne: float = 0.2

    l: float = 100.0
    sigma_f: float = 0.5
    sigma_n: float = 0.5
    f_mec: float = 1e8
    varpi: float = 100.0

    quad_n: int = 1000
    quad_o: int = 1000
    lemma1_inner: str = "clipped"

    @property
    def uav(self) -> Coord3:
        return Coord3(self.x_u, self.y_u, self.h_u)

    @property
    def far(self) -> Coord3:
        return Coord3(self.x_f, self.y_f, 0.0)

    @property
    def near(self) -> Coord3:
        return Coord3(self.x_n, self.y_n, 0.0)

    @property
    def eve(self) -> Coord3:
        return Coord3(self.x_e, self.y_e, 0.0)

    @property
    def env(self) -> EnvProfile:
        return EnvProfile(self.tau1, self.tau2, self.mu_los, self.mu_nlos,
                          self.theta, self.c, self.f_c)

    @property
    def gamma_u(self) -> float:
        return db_to_linear(self.gamma_u_db)

    @property
    def gamma_e(self) -> float:
        return db_to_linear(self.gamma_e_db)

    def xi(self, link: str) -> float:
        return getattr(self, f"xi_{link}")

    def omega(self, link: str) -> float:
        return getattr(self, f"omega_{link}")

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **_expand_aliases(changes))


@dataclass(frozen=True)
class SscpEstimate:
    """One SSCP value plus provenance.

    ``value`` is the raw number (for the lemmas it may overshoot [0, 1] by the
    quadrature error); ``clamped`` is the same value clipped to [0, 1].
    """

    value: float
    method: str
    stderr: float | None = None
    trials: int | None = None
    seed: int | None = None
    error_bound: float | None = None
    quad_orders: tuple[int, int] | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def clamped(self) -> float:
        return min(1.0, max(0.0, self.value))


def db_to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def offload_bits(cfg: ScenarioConfig) -> tuple[float, float]:
    """Offloaded task sizes ``(C_F, C_N)`` in bits."""
    return cfg.sigma_f * cfg.l, cfg.sigma_n * cfg.l


def phase_timing(cfg: ScenarioConfig) -> PhaseTiming:
    c_f, c_n = offload_bits(cfg)
    t_com = (c_f + c_n) * cfg.varpi / cfg.f_mec
    t_wpt = cfg.eta * cfg.T
    t_th = (1.0 - cfg.eta) * cfg.T - t_com
    if not t_th > 0:
        raise ConfigError("nonpositive-offload-window", "eta",
                          f"(1-eta)T - t_com = {t_th!r} must be > 0")
    return PhaseTiming(t_wpt=t_wpt, t_com=t_com, t_th=t_th)


def _open_unit(cfg, key, lo=0.0, hi=1.0, code=None):
    v = getattr(cfg, key)
    if not (lo < v < hi):
        raise ConfigError(code or f"{key}-out-of-range", key,
                          f"{key}={v!r} must lie in ({lo}, {hi})")


def validate_config(cfg: ScenarioConfig, *, analytic: bool = False) -> ScenarioConfig:
    """Check every invariant and return ``cfg`` unchanged.

    With ``analytic=True`` the closed-form restrictions (integer ``m >= 2``)
    are enforced too.  The first violation raises :class:`ConfigError`.
    """
    for key in ("x_u", "y_u", "h_u", "x_f", "y_f", "x_n", "y_n", "x_e", "y_e",
                "gamma_u_db", "gamma_e_db"):
        if not math.isfinite(getattr(cfg, key)):
            raise ConfigError("non-finite", key, f"{key} must be finite")
    if not cfg.h_u > 0:
        raise ConfigError("uav-on-ground", "h_u", "UAV altitude must be > 0")
    for key in ("K", "Q", "quad_n", "quad_o"):
        v = getattr(cfg, key)
        if not (isinstance(v, int) and v >= 1):
            raise ConfigError("not-positive-integer", key, f"{key}={v!r}")
    if not (isinstance(cfg.m, int) and cfg.m >= 1):
        raise ConfigError("bad-nakagami-shape", "m", f"m={cfg.m!r} must be an integer >= 1")
    if analytic and cfg.m < 2:
        raise ConfigError("analytic-unsupported", "m", "closed forms need m >= 2")

    if not cfg.mu_nlos >= cfg.mu_los > 0:
        raise ConfigError("bad-excess-loss", "mu_los", "need mu_nlos >= mu_los > 0")
    if not cfg.theta >= 2:
        raise ConfigError("bad-pathloss-exponent", "theta", "theta must be >= 2")
    for key in ("c", "f_c", "T", "W", "f_mec"):
        if not getattr(cfg, key) > 0:
            raise ConfigError("nonpositive", key, f"{key} must be > 0")
    if cfg.tau1 < 0 or cfg.tau2 < 0:
        raise ConfigError("bad-sigmoid", "tau1", "tau1, tau2 must be >= 0")
    if cfg.pathloss_variant not in ("as-printed", "fspl-squared"):
        raise ConfigError("unknown-variant", "pathloss_variant", cfg.pathloss_variant)
    if cfg.lemma1_inner not in ("as-printed", "clipped"):
        raise ConfigError("unknown-variant", "lemma1_inner", cfg.lemma1_inner)

    for link in LINKS:
        if not cfg.xi(link) > 0:
            raise ConfigError("nonpositive", f"xi_{link}", "mean channel power must be > 0")
        if not cfg.omega(link) >= 0:
            raise ConfigError("negative", f"omega_{link}", "error variance must be >= 0")
    if not 0 <= cfg.nu1 <= 1:
        raise ConfigError("nu1-out-of-range", "nu1", f"nu1={cfg.nu1!r} must lie in [0, 1]")

    _open_unit(cfg, "beta", code="eh-conversion-out-of-range")
    _open_unit(cfg, "eta", code="eh-ratio-out-of-range")
    _open_unit(cfg, "sigma_f", code="offload-ratio-out-of-range")
    _open_unit(cfg, "sigma_n", code="offload-ratio-out-of-range")

    for a, b in (("rho_fu", "rho_nu"), ("rho_fe", "rho_ne")):
        ra, rb = getattr(cfg, a), getattr(cfg, b)
        if not ra > rb > 0:
            raise ConfigError("bad-power-split", a, f"need {a} > {b} > 0")
        if abs(ra + rb - 1.0) > 1e-12:
            raise ConfigError("bad-power-split", a, f"{a} + {b} must equal 1")

    if not cfg.l >= 0:
        raise ConfigError("negative", "l", "task length must be >= 0")
    if not cfg.varpi >= 0:
        raise ConfigError("negative", "varpi", "cycles per bit must be >= 0")
    phase_timing(cfg)
    return cfg


# --------------------------------------------------------------------------
# config files and overrides

_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}


def _expand_aliases(values: Mapping[str, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, v in values.items():
        if key in ("xi", "omega"):
            for link in LINKS:
                out.setdefault(f"{key}_{link}", v)
        else:
            out[key] = v
    # explicit per-link keys beat the alias regardless of order
    for key, v in values.items():
        if key not in ("xi", "omega"):
            out[key] = v
    return out


def _strip_group(key: str) -> str:
    parts = key.split(".")
    while len(parts) > 1 and parts[0] in GROUPS:
        parts = parts[1:]
    if len(parts) != 1:
        raise ConfigError("unknown-key", key, "unknown group prefix")
    return parts[0]


def _flatten(d: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    out: dict[str, Any] = {}
    for k, v in d.items():
        k = f"{prefix}{k}"
        if isinstance(v, Mapping):
            out.update(_flatten(v, k + "."))
        else:
            out[k] = v
    return out


def is_config_key(key: str) -> bool:
    return key in _FIELDS or key in ("xi", "omega")


def coerce_value(key: str, value: Any) -> Any:
    """Convert ``value`` (often a string) to the type of config key ``key``."""
    if key in ("xi", "omega"):
        typ = "float"
    elif key in _FIELDS:
        typ = _FIELDS[key].type
    else:
        raise ConfigError("unknown-key", key, "not a configuration key")
    if isinstance(value, str):
        value = value.strip()
    try:
        if typ == "int":
            if isinstance(value, bool):
                raise ValueError(value)
            f = float(value)
            if not f.is_integer():
                raise ValueError(value)
            return int(f)
        if typ == "float":
            return float(value)
        return str(value)
    except (TypeError, ValueError):
        raise ConfigError("bad-value", key, f"cannot interpret {value!r}") from None


def apply_overrides(cfg: ScenarioConfig, overrides: Mapping[str, Any]) -> ScenarioConfig:
    """Return ``cfg`` with ``overrides`` applied (values may be strings)."""
    changes = {}
    for raw_key, value in overrides.items():
        key = _strip_group(raw_key)
        changes[key] = coerce_value(key, value)
    return cfg.replace(**changes)


def parse_assignment(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError("bad-override", text, "expected key=value")
    return key.strip(), value.strip()


def load_config(path: str | Path | None = None,
                overrides: Mapping[str, Any] | None = None) -> ScenarioConfig:
    """Read a YAML config file (or start from defaults) and apply overrides.

    Validation is left to the caller so that sweep grids can validate each
    point separately.
    """
    cfg = ScenarioConfig()
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = yaml.safe_load(fh) or {}
        if not isinstance(data, Mapping):
            raise ConfigError("bad-file", str(path), "top level must be a mapping")
        cfg = apply_overrides(cfg, _flatten(data))
    if overrides:
        cfg = apply_overrides(cfg, overrides)
    return cfg
