"""Secrecy successful computation probability (SSCP) of a UAV-assisted NOMA-MEC uplink.

Three independent evaluators share one scenario model:

* :func:`sscp.analytic.sscp_analytic` (closed-form Gauss-Chebyshev lemmas),
* :func:`sscp.refintegral.sscp_ref` (nested adaptive quadrature),
* :func:`sscp.montecarlo.estimate_sscp` (end-to-end protocol simulation).
"""

from .analytic import sscp_analytic, sscp_isic, sscp_psic
from .experiments import grid_position, optimize_scalar, run_sweep
from .montecarlo import McConfig, estimate_sscp
from .refintegral import IntegralSpec, ToleranceNotMet, sscp_ref
from .sysmodel import ConfigError, ScenarioConfig, SscpEstimate, load_config, validate_config

__all__ = [
    "ConfigError",
    "IntegralSpec",
    "McConfig",
    "ScenarioConfig",
    "SscpEstimate",
    "ToleranceNotMet",
    "estimate_sscp",
    "grid_position",
    "load_config",
    "optimize_scalar",
    "run_sweep",
    "sscp_analytic",
    "sscp_isic",
    "sscp_psic",
    "sscp_ref",
    "validate_config",
]

__version__ = "0.1.0"
