"""How residual SIC interference and channel-estimation error move the SSCP.

Also shows why the Lemma-1 inner limit is clipped by default: as the
residual factor goes to zero the printed limit runs far past the support of
the far-device density and the fixed-order quadrature misses most of it.
"""

from sscp import sscp_isic, sscp_psic
from sscp.experiments import figure_config

cfg = figure_config(4)
perfect = sscp_psic(cfg.replace(nu1=0.0)).value
print(f"perfect SIC: {perfect:.6f}")
for nu1 in (0.4, 0.1, 1e-2, 1e-3, 1e-4):
    c = cfg.replace(nu1=nu1)
    clipped = sscp_isic(c).value
    printed = sscp_isic(c, inner="as-printed").value
    print(f"nu1={nu1:<7g} clipped {clipped:.6f}   as-printed {printed:.6f}")

print("\ngamma_U  (Omega=0,nu1=0)  (Omega=3,nu1=0)  (Omega=3,nu1=0.4)")
for g in (0, 10, 20, 30, 40):
    vals = [sscp_psic(cfg.replace(omega=0.0, nu1=0.0, gamma_u_db=g)).value,
            sscp_psic(cfg.replace(omega=3.0, nu1=0.0, gamma_u_db=g)).value,
            sscp_isic(cfg.replace(omega=3.0, nu1=0.4, gamma_u_db=g)).value]
    print(f"{g:5d} dB  " + "  ".join(f"{v:15.6f}" for v in vals))
# At 0 dB the estimation error costs the eavesdropper more than the UAV,
# so the imperfect-CSI curve sits slightly above the perfect one.
